fn main() {
    std::process::exit(ckm::cli::run(std::env::args_os()));
}
