mod common;

use std::fs;
use std::path::PathBuf;

use ckm::metrics::{compute_all, dependency_edges};
use ckm::model::{export_model, import_model, CallSite};
use ckm::parser::{analyze_paths, parse_source, tokenize, TokenKind};
use walkdir::WalkDir;

fn corpus() -> PathBuf {
    common::fixtures().join("corpus")
}

fn java_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = WalkDir::new(common::fixtures())
        .into_iter()
        .filter_map(Result::ok)
        .map(|e| e.into_path())
        .filter(|p| p.extension().is_some_and(|x| x == "java"))
        .collect();
    files.sort();
    files
}

#[test]
fn corpus_has_twelve_files_and_parses_cleanly() {
    let files: Vec<_> = java_files()
        .into_iter()
        .filter(|p| p.starts_with(corpus()))
        .collect();
    assert_eq!(files.len(), 12);
    let model = analyze_paths(&[corpus()]).unwrap();
    assert!(
        model.diagnostics().iter().all(|d| !d.is_error()),
        "{:?}",
        model.diagnostics()
    );
    // The one deliberate defect: `purge` is not declared on Repository.
    assert_eq!(model.diagnostics().len(), 1);
}

#[test]
fn directory_and_explicit_listing_agree() {
    let files: Vec<PathBuf> = java_files()
        .into_iter()
        .filter(|p| p.starts_with(corpus()))
        .collect();
    let mut reversed = files.clone();
    reversed.reverse();
    let from_dir = analyze_paths(&[corpus()]).unwrap();
    let from_files = analyze_paths(&reversed).unwrap();
    assert_eq!(
        export_model(&from_dir).unwrap(),
        export_model(&from_files).unwrap()
    );
}

#[test]
fn committed_expected_model_imports_to_the_same_model() {
    let doc = fs::read(common::fixtures().join("expected_model.json")).unwrap();
    let expected = import_model(&doc).unwrap();
    assert_eq!(analyze_paths(&[corpus()]).unwrap(), expected);
}

#[test]
fn hand_tallied_edges() {
    let model = analyze_paths(&[corpus()]).unwrap();
    assert_eq!(model.internal_classes().count(), 12);
    assert_eq!(
        model.classes().len() - 12,
        3,
        "stubs String, java.util.List, java.util.Map"
    );

    let edges = dependency_edges(&model);
    let internal = edges
        .iter()
        .filter(|e| !model.class(&e.to_fqn).unwrap().is_external)
        .count();
    assert_eq!(internal, 19);
    // String: Address, Customer, Item, Product, OrderService. List: Order, Cart. Map: MemoryRepository.
    assert_eq!(edges.len(), 19 + 8);

    let rows = compute_all(&model).unwrap();
    let get = |fqn: &str| rows.iter().find(|r| r.class_fqn == fqn).unwrap();
    // Product: parent Item; ctor params mention String; value() calls inherited price().
    let p = get("shop.model.Product");
    assert_eq!((p.ce, p.ca, p.dit, p.cbo, p.rfc), (2, 2, 2, 2, 7));
    assert_eq!((p.lcom1, p.lcom2, p.lcom3, p.lcom4), (7, 4, 3, 2));
    // OrderService: ten distinct resolved callees plus six own methods; purge left out.
    let s = get("shop.service.OrderService");
    assert_eq!((s.ce, s.cbo, s.rfc), (8, 8, 16));
    // Order is used by Repository, MemoryRepository, OrderService and Main.
    assert_eq!(get("shop.model.Order").ca, 4);
    assert_eq!(get("shop.model.Entity").ca, 3);
}

#[test]
fn call_resolution_cases() {
    let model = analyze_paths(&[corpus()]).unwrap();
    let calls = |fqn: &str, name: &str| {
        model
            .class(fqn)
            .unwrap()
            .methods
            .iter()
            .find(|m| m.name == name)
            .unwrap()
            .calls
            .clone()
    };

    // Chain through in-corpus return types.
    let dest = calls("shop.service.OrderService", "destination");
    assert!(dest.contains(&CallSite::resolved("shop.model.Address", "city", 0)));
    // Static call through the imported class name.
    assert!(
        calls("shop.service.OrderService", "checkout").contains(&CallSite::resolved(
            "shop.util.Prices",
            "round",
            1
        ))
    );
    // Unknown method on a known class stays unresolved but keeps the class.
    assert_eq!(
        calls("shop.service.OrderService", "archive")
            .into_iter()
            .collect::<Vec<_>>(),
        [CallSite::unresolved(
            Some("shop.service.Repository".into()),
            "purge",
            1
        )]
    );
    // super(...) targets the parent constructor.
    let ctor = model
        .class("shop.model.Product")
        .unwrap()
        .method("Product", 4)
        .unwrap();
    assert!(ctor
        .calls
        .contains(&CallSite::resolved("shop.model.Item", "Item", 3)));
    // Implicit default constructors record nothing.
    let main = model.class("Main").unwrap().method("Main", 0).unwrap();
    assert_eq!(main.calls.len(), 1);
}

#[test]
fn shadowing_and_field_access() {
    let model = analyze_paths(&[corpus()]).unwrap();
    let uses = |fqn: &str, name: &str, arity: usize| {
        model
            .class(fqn)
            .unwrap()
            .method(name, arity)
            .unwrap()
            .attributes_used
            .iter()
            .cloned()
            .collect::<Vec<_>>()
    };
    // Local `city` shadows the field.
    assert_eq!(uses("shop.model.Address", "postal", 0), ["zip"]);
    // Parameters shadow the inherited fields; only `this.stock` is a field use.
    assert_eq!(uses("shop.model.Product", "Product", 4), ["stock"]);
    // Inherited field read by bare name.
    assert_eq!(uses("shop.model.Product", "rawPrice", 0), ["price"]);
    assert_eq!(uses("shop.model.Item", "Item", 3), ["id", "name", "price"]);
}

#[test]
fn token_count_matches_hand_count() {
    let text = fs::read_to_string(common::fixtures().join("tokens").join("Counter.java")).unwrap();
    assert_eq!(text.lines().count(), 30);
    let stream = tokenize(&text, "Counter.java");
    assert!(stream.diagnostics.is_empty());
    let count = stream
        .tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Eof)
        .count();
    assert_eq!(count, 113);
    let comments = stream
        .tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Comment)
        .count();
    assert_eq!(comments, 2);
}

#[test]
fn tokenizer_round_trips_every_fixture() {
    for path in java_files() {
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(
            tokenize(&text, "f").reconstruct(),
            text,
            "{}",
            path.display()
        );
    }
}

#[test]
fn malformed_method_is_flagged_and_neighbours_survive() {
    let src = "class A {\n  int x;\n  void a() { x = 1; }\n  void b() { x = ; }\n  void c() { a(); }\n}\n";
    let unit = parse_source(src, "A.java");
    let methods = &unit.type_decls[0].methods;
    assert_eq!(methods.len(), 3);
    assert_eq!(
        methods
            .iter()
            .filter(|m| m.malformed)
            .map(|m| m.name.as_str())
            .collect::<Vec<_>>(),
        ["b"]
    );
    assert!(unit
        .diagnostics
        .iter()
        .any(|d| d.is_error() && d.location.line == 4));
}
