//! Full-fidelity lexer for the Java-like subset.
//!
//! Whitespace is kept as leading trivia on the following token and comments
//! are tokens of their own, so concatenating `trivia + text` over the stream
//! reproduces the input exactly.

use crate::model::{Diagnostic, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Punctuation,
    StringLiteral,
    NumberLiteral,
    Comment,
    /// Unterminated literal or comment, or a character outside the subset.
    Error,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Whitespace preceding the token.
    pub trivia: String,
    pub location: Location,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punctuation, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }
}

#[derive(Debug, Clone, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
}

impl TokenStream {
    /// Rebuilds the source text.
    pub fn reconstruct(&self) -> String {
        let mut out = String::new();
        for tok in &self.tokens {
            out.push_str(&tok.trivia);
            out.push_str(&tok.text);
        }
        out
    }
}

pub const KEYWORDS: &[&str] = &[
    "abstract",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "void",
    "volatile",
    "while",
];

const PUNCT3: &[&str] = &["...", ">>>", "<<="];
const PUNCT2: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "->", "::",
];
const PUNCT1: &str = "{}()[];,.=<>!~?:+-*/&|^%@";

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub fn tokenize(source: &str, file: &str) -> TokenStream {
    let mut cur = Cursor {
        src: source,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut out = TokenStream::default();

    loop {
        let trivia_start = cur.pos;
        cur.bump_while(char::is_whitespace);
        let trivia = source[trivia_start..cur.pos].to_string();

        let location = Location::new(file, cur.line, cur.column);
        let start = cur.pos;
        let Some(c) = cur.peek() else {
            out.tokens.push(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                trivia,
                location,
            });
            break;
        };

        let kind = if cur.rest().starts_with("//") {
            cur.bump_while(|c| c != '\n');
            TokenKind::Comment
        } else if cur.rest().starts_with("/*") {
            cur.bump();
            cur.bump();
            loop {
                if cur.rest().starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    break TokenKind::Comment;
                }
                if cur.bump().is_none() {
                    out.diagnostics.push(Diagnostic::error(
                        location.clone(),
                        "unterminated block comment",
                    ));
                    break TokenKind::Error;
                }
            }
        } else if c == '"' || c == '\'' {
            lex_quoted(&mut cur, c, &location, &mut out.diagnostics)
        } else if c.is_ascii_digit()
            || (c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
        {
            cur.bump_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
            TokenKind::NumberLiteral
        } else if is_ident_start(c) {
            cur.bump_while(is_ident_continue);
            if KEYWORDS.contains(&&source[start..cur.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if let Some(p) = PUNCT3
            .iter()
            .chain(PUNCT2)
            .find(|p| cur.rest().starts_with(**p))
        {
            for _ in 0..p.len() {
                cur.bump();
            }
            TokenKind::Punctuation
        } else if PUNCT1.contains(c) {
            cur.bump();
            TokenKind::Punctuation
        } else {
            cur.bump();
            out.diagnostics.push(Diagnostic::error(
                location.clone(),
                format!("unexpected character `{c}`"),
            ));
            TokenKind::Error
        };

        out.tokens.push(Token {
            kind,
            text: source[start..cur.pos].to_string(),
            trivia,
            location,
        });
    }
    out
}

/// String or character literal. Stops before a newline when unterminated.
fn lex_quoted(
    cur: &mut Cursor<'_>,
    quote: char,
    location: &Location,
    diags: &mut Vec<Diagnostic>,
) -> TokenKind {
    cur.bump();
    loop {
        match cur.peek() {
            None | Some('\n') => {
                let what = if quote == '"' { "string" } else { "character" };
                diags.push(Diagnostic::error(
                    location.clone(),
                    format!("unterminated {what} literal"),
                ));
                return TokenKind::Error;
            }
            Some('\\') => {
                cur.bump();
                if cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            }
            Some(c) if c == quote => {
                cur.bump();
                return TokenKind::StringLiteral;
            }
            Some(_) => {
                cur.bump();
            }
        }
    }
}
