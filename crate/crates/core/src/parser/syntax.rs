//! Recursive-descent parser producing one [`SyntaxUnit`] per file.
//!
//! Errors never abort the file. Inside a method body the parser gives up on
//! the rest of that body and flags the method; at member or declaration level
//! it skips to the next `;` or balanced block and carries on.

use crate::model::{ClassKind, Diagnostic, Location};

use super::lexer::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxUnit {
    pub file: String,
    /// Empty for the default package.
    pub package: String,
    pub imports: Vec<Import>,
    pub type_decls: Vec<TypeDecl>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub fqn: String,
    pub location: Location,
}

impl Import {
    pub fn simple_name(&self) -> &str {
        self.fqn.rsplit('.').next().unwrap_or(&self.fqn)
    }
}

/// A type as written: possibly qualified, generics and array dimensions removed.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeRef {
    pub name: String,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub kind: ClassKind,
    pub location: Location,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeRef,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub params: Vec<Param>,
    /// `None` for constructors.
    pub return_type: Option<TypeRef>,
    pub body: Option<Vec<Stmt>>,
    /// Set when part of the body could not be parsed.
    pub malformed: bool,
    pub location: Location,
}

impl MethodDecl {
    pub fn is_constructor(&self) -> bool {
        self.return_type.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Local {
        ty: TypeRef,
        name: String,
        init: Option<Expr>,
    },
    Expr(Expr),
    Return(Option<Expr>),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    Block(Vec<Stmt>),
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtorTarget {
    This,
    Super,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal,
    Name(String, Location),
    This,
    Super,
    Field {
        target: Box<Expr>,
        name: String,
        location: Location,
    },
    Call {
        receiver: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
        location: Location,
    },
    /// `this(...)` or `super(...)` inside a constructor.
    CtorCall {
        target: CtorTarget,
        args: Vec<Expr>,
        location: Location,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
    },
    NewArray {
        ty: TypeRef,
        dims: Vec<Expr>,
    },
    Index {
        target: Box<Expr>,
        index: Box<Expr>,
    },
    Assign {
        target: Box<Expr>,
        value: Box<Expr>,
    },
    Unary(Box<Expr>),
    Binary(Box<Expr>, Box<Expr>),
    Conditional(Box<Expr>, Box<Expr>, Box<Expr>),
    InstanceOf(Box<Expr>, TypeRef),
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
];

const PRIMITIVE_KEYWORDS: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

const UNSUPPORTED_STATEMENTS: &[&str] = &[
    "for",
    "do",
    "switch",
    "try",
    "throw",
    "break",
    "continue",
    "synchronized",
    "class",
    "interface",
    "enum",
    "case",
    "default",
    "catch",
    "finally",
];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="];

struct ParseError {
    location: Location,
    message: String,
}

type PResult<T> = Result<T, ParseError>;

/// Parses a token stream (as produced by `tokenize`) into a syntax unit.
pub fn parse_unit(tokens: &[Token]) -> SyntaxUnit {
    let significant: Vec<Token> = tokens
        .iter()
        .filter(|t| !matches!(t.kind, TokenKind::Comment | TokenKind::Error))
        .cloned()
        .collect();
    let file = tokens
        .first()
        .map(|t| t.location.file.clone())
        .unwrap_or_default();
    let mut parser = Parser::new(significant, file);
    parser.unit()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// For each `{`, the index of its matching `}`.
    brace_match: Vec<Option<usize>>,
    file: String,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn new(mut toks: Vec<Token>, file: String) -> Self {
        if toks.last().map(|t| t.kind) != Some(TokenKind::Eof) {
            let location = toks
                .last()
                .map(|t| t.location.clone())
                .unwrap_or_else(|| Location::new(file.clone(), 1, 1));
            toks.push(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                trivia: String::new(),
                location,
            });
        }
        let mut brace_match = vec![None; toks.len()];
        let mut stack = Vec::new();
        let mut diags = Vec::new();
        let mut balanced = true;
        for (idx, tok) in toks.iter().enumerate() {
            if tok.is_punct("{") {
                stack.push(idx);
            } else if tok.is_punct("}") {
                match stack.pop() {
                    Some(open) => brace_match[open] = Some(idx),
                    None => balanced = false,
                }
            }
        }
        if !balanced || !stack.is_empty() {
            let location = stack
                .first()
                .map(|&i| toks[i].location.clone())
                .unwrap_or_else(|| Location::new(file.clone(), 1, 1));
            diags.push(Diagnostic::error(location, "unbalanced braces in file"));
        }
        Self {
            toks,
            pos: 0,
            brace_match,
            file,
            diags,
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if !self.at_eof() {
            self.pos += 1;
        }
        tok
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.peek().is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.peek().is_keyword(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let tok = self.peek();
        let found = if tok.kind == TokenKind::Eof {
            "end of file".to_string()
        } else {
            format!("`{}`", tok.text)
        };
        Err(ParseError {
            location: tok.location.clone(),
            message: format!("{}, found {found}", message.into()),
        })
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("expected `{p}`"))
        }
    }

    fn ident(&mut self) -> PResult<(String, Location)> {
        if self.peek().kind == TokenKind::Identifier {
            let tok = self.bump();
            Ok((tok.text, tok.location))
        } else {
            self.error("expected identifier")
        }
    }

    fn report(&mut self, err: ParseError) {
        self.diags
            .push(Diagnostic::error(err.location, err.message));
    }

    fn reject(&mut self, location: Location, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(location, message));
    }

    /// Skips to just past the next `;` or balanced `{...}` block at the
    /// current nesting level, stopping early at a closing `}`.
    fn recover_declaration(&mut self) {
        let mut parens = 0usize;
        while !self.at_eof() {
            let tok = self.peek();
            if tok.is_punct("{") {
                self.skip_block();
                if parens == 0 {
                    return;
                }
                continue;
            }
            if tok.is_punct("}") {
                return;
            }
            if tok.is_punct("(") {
                parens += 1;
            } else if tok.is_punct(")") {
                parens = parens.saturating_sub(1);
            } else if tok.is_punct(";") && parens == 0 {
                self.pos += 1;
                return;
            }
            self.pos += 1;
        }
    }

    /// At `{`: jumps past the matching `}` (or to end of file).
    fn skip_block(&mut self) {
        match self.brace_match[self.pos] {
            Some(close) => self.pos = close + 1,
            None => self.pos = self.toks.len() - 1,
        }
    }

    /// Skips `<...>` with nesting, if present.
    fn skip_type_arguments(&mut self) -> PResult<()> {
        if !self.peek().is_punct("<") {
            return Ok(());
        }
        let mut depth = 0usize;
        loop {
            let tok = self.bump();
            if tok.kind == TokenKind::Eof {
                return self.error("unterminated type arguments");
            }
            if tok.is_punct("<") {
                depth += 1;
            } else if tok.is_punct(">") {
                depth -= 1;
                if depth == 0 {
                    return Ok(());
                }
            } else if tok.is_punct(">>>") {
                depth = depth.saturating_sub(3);
                if depth == 0 {
                    return Ok(());
                }
            } else if tok.is_punct(";") || tok.is_punct("{") || tok.is_punct("}") {
                return Err(ParseError {
                    location: tok.location,
                    message: "malformed type arguments".into(),
                });
            }
        }
    }

    fn skip_annotation(&mut self) {
        let location = self.bump().location;
        self.reject(location, "annotations are not supported");
        let _ = self.qualified_name();
        if self.peek().is_punct("(") {
            let mut depth = 0usize;
            while !self.at_eof() {
                let tok = self.bump();
                if tok.is_punct("(") {
                    depth += 1;
                } else if tok.is_punct(")") {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
            }
        }
    }

    fn qualified_name(&mut self) -> PResult<(String, Location)> {
        let (mut name, location) = self.ident()?;
        while self.peek().is_punct(".") && self.peek_at(1).kind == TokenKind::Identifier {
            self.pos += 1;
            name.push('.');
            name.push_str(&self.bump().text);
        }
        Ok((name, location))
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let tok = self.peek().clone();
        let (name, location) =
            if tok.kind == TokenKind::Keyword && PRIMITIVE_KEYWORDS.contains(&tok.text.as_str()) {
                self.pos += 1;
                (tok.text, tok.location)
            } else {
                let (name, location) = self.qualified_name()?;
                self.skip_type_arguments()?;
                (name, location)
            };
        while self.peek().is_punct("[") && self.peek_at(1).is_punct("]") {
            self.pos += 2;
        }
        self.eat_punct("...");
        Ok(TypeRef { name, location })
    }

    fn skip_modifiers(&mut self) {
        loop {
            let tok = self.peek();
            if tok.kind == TokenKind::Keyword && MODIFIERS.contains(&tok.text.as_str()) {
                // `static {` is an initializer, not a modifier.
                if tok.text == "static" && self.peek_at(1).is_punct("{") {
                    return;
                }
                self.pos += 1;
            } else if tok.is_punct("@") && !self.peek_at(1).is_keyword("interface") {
                self.skip_annotation();
            } else {
                return;
            }
        }
    }

    fn unit(&mut self) -> SyntaxUnit {
        let mut package = String::new();
        let mut imports = Vec::new();
        let mut type_decls = Vec::new();

        if self.peek().is_keyword("package") {
            self.pos += 1;
            match self.qualified_name().and_then(|(name, _)| {
                self.expect_punct(";")?;
                Ok(name)
            }) {
                Ok(name) => package = name,
                Err(e) => {
                    self.report(e);
                    self.recover_declaration();
                }
            }
        }

        while !self.at_eof() {
            let tok = self.peek().clone();
            if tok.is_keyword("import") {
                self.pos += 1;
                match self.import(tok.location.clone()) {
                    Ok(Some(import)) => imports.push(import),
                    Ok(None) => {}
                    Err(e) => {
                        self.report(e);
                        self.recover_declaration();
                    }
                }
                continue;
            }
            if tok.is_punct(";") {
                self.pos += 1;
                continue;
            }
            if tok.is_keyword("package") {
                self.reject(tok.location, "package declaration must come first");
                self.recover_declaration();
                continue;
            }

            self.skip_modifiers();
            let tok = self.peek().clone();
            if tok.is_keyword("class") || tok.is_keyword("interface") {
                match self.type_decl() {
                    Ok(decl) => type_decls.push(decl),
                    Err(e) => {
                        self.report(e);
                        self.recover_declaration();
                    }
                }
            } else if tok.is_keyword("enum") || tok.is_punct("@") {
                self.reject(tok.location, "enum and annotation types are not supported");
                self.recover_declaration();
            } else if tok.is_punct("}") {
                self.reject(tok.location, "unexpected `}`");
                self.pos += 1;
            } else if !self.at_eof() {
                self.reject(
                    tok.location,
                    format!("expected a type declaration, found `{}`", tok.text),
                );
                self.recover_declaration();
            }
        }

        SyntaxUnit {
            file: self.file.clone(),
            package,
            imports,
            type_decls,
            diagnostics: std::mem::take(&mut self.diags),
        }
    }

    fn import(&mut self, location: Location) -> PResult<Option<Import>> {
        if self.peek().is_keyword("static") {
            self.reject(location, "static imports are not supported");
            self.recover_declaration();
            return Ok(None);
        }
        let (fqn, _) = self.qualified_name()?;
        if self.peek().is_punct(".") && self.peek_at(1).is_punct("*") {
            self.reject(location, "wildcard imports are not supported");
            self.recover_declaration();
            return Ok(None);
        }
        self.expect_punct(";")?;
        Ok(Some(Import { fqn, location }))
    }

    fn type_list(&mut self) -> PResult<Vec<TypeRef>> {
        let mut out = vec![self.type_ref()?];
        while self.eat_punct(",") {
            out.push(self.type_ref()?);
        }
        Ok(out)
    }

    fn type_decl(&mut self) -> PResult<TypeDecl> {
        let kind = if self.bump().is_keyword("class") {
            ClassKind::Class
        } else {
            ClassKind::Interface
        };
        let (name, location) = self.ident()?;
        self.skip_type_arguments()?;

        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.eat_keyword("extends") {
            extends = match kind {
                ClassKind::Class => vec![self.type_ref()?],
                ClassKind::Interface => self.type_list()?,
            };
        }
        if self.peek().is_keyword("implements") {
            if kind == ClassKind::Interface {
                return self.error("interfaces cannot implement types");
            }
            self.pos += 1;
            implements = self.type_list()?;
        }
        if !self.peek().is_punct("{") {
            return self.error("expected `{` to open the type body");
        }
        let open = self.pos;
        let close = self.brace_match[open];
        self.pos += 1;

        let mut decl = TypeDecl {
            name,
            kind,
            location,
            extends,
            implements,
            fields: Vec::new(),
            methods: Vec::new(),
        };

        loop {
            if Some(self.pos) == close {
                self.pos += 1;
                break;
            }
            if self.at_eof() {
                let location = self.peek().location.clone();
                self.reject(location, format!("type `{}` is not closed", decl.name));
                break;
            }
            if let Err(e) = self.member(&mut decl) {
                self.report(e);
                self.recover_declaration();
                if self.peek().is_punct("}") && Some(self.pos) != close {
                    self.pos += 1;
                }
            }
        }
        Ok(decl)
    }

    fn member(&mut self, decl: &mut TypeDecl) -> PResult<()> {
        if self.eat_punct(";") {
            return Ok(());
        }
        let start = self.peek().clone();
        if start.is_keyword("static") && self.peek_at(1).is_punct("{") {
            self.reject(start.location, "static initializers are not supported");
            self.pos += 1;
            self.skip_block();
            return Ok(());
        }
        if start.is_punct("{") {
            self.reject(start.location, "instance initializers are not supported");
            self.skip_block();
            return Ok(());
        }
        self.skip_modifiers();
        let tok = self.peek().clone();
        if tok.is_keyword("class") || tok.is_keyword("interface") || tok.is_keyword("enum") {
            self.reject(tok.location, "nested types are not supported");
            self.recover_declaration();
            return Ok(());
        }
        if tok.is_punct("<") {
            self.skip_type_arguments()?;
        }

        let tok = self.peek().clone();
        if tok.kind == TokenKind::Identifier
            && tok.text == decl.name
            && self.peek_at(1).is_punct("(")
        {
            self.pos += 1;
            let method = self.method_rest(tok.text, None, tok.location)?;
            decl.methods.push(method);
            return Ok(());
        }

        let ty = self.type_ref()?;
        let (name, location) = self.ident()?;
        if self.peek().is_punct("(") {
            let method = self.method_rest(name, Some(ty), location)?;
            decl.methods.push(method);
            return Ok(());
        }
        if ty.name == "void" {
            return Err(ParseError {
                location,
                message: "fields cannot have type void".into(),
            });
        }
        while self.peek().is_punct("[") && self.peek_at(1).is_punct("]") {
            self.pos += 2;
        }
        if self.peek().is_punct("=") {
            return self.error("field initializers are not supported");
        }
        if self.peek().is_punct(",") {
            return self.error("one field per declaration");
        }
        self.expect_punct(";")?;
        decl.fields.push(FieldDecl { name, ty, location });
        Ok(())
    }

    fn method_rest(
        &mut self,
        name: String,
        return_type: Option<TypeRef>,
        location: Location,
    ) -> PResult<MethodDecl> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.eat_punct(")") {
            loop {
                self.skip_modifiers();
                let ty = self.type_ref()?;
                let (pname, _) = self.ident()?;
                while self.peek().is_punct("[") && self.peek_at(1).is_punct("]") {
                    self.pos += 2;
                }
                params.push(Param { name: pname, ty });
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        if self.eat_keyword("throws") {
            self.type_list()?;
        }

        let mut method = MethodDecl {
            name,
            params,
            return_type,
            body: None,
            malformed: false,
            location,
        };
        if self.eat_punct(";") {
            return Ok(method);
        }
        if !self.peek().is_punct("{") {
            return self.error("expected method body or `;`");
        }
        let open = self.pos;
        let Some(close) = self.brace_match[open] else {
            method.malformed = true;
            self.pos = self.toks.len() - 1;
            return Ok(method);
        };
        self.pos += 1;
        let mut body = Vec::new();
        while self.pos < close {
            match self.statement() {
                Ok(stmt) => body.push(stmt),
                Err(e) => {
                    self.report(e);
                    method.malformed = true;
                    break;
                }
            }
        }
        self.pos = close + 1;
        method.body = Some(body);
        Ok(method)
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.peek().is_punct("}") {
            if self.at_eof() {
                return self.error("expected `}`");
            }
            stmts.push(self.statement()?);
        }
        self.pos += 1;
        Ok(stmts)
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let tok = self.peek().clone();
        if tok.is_punct("{") {
            return Ok(Stmt::Block(self.block()?));
        }
        if tok.is_punct(";") {
            self.pos += 1;
            return Ok(Stmt::Empty);
        }
        if tok.kind == TokenKind::Keyword {
            match tok.text.as_str() {
                "return" => {
                    self.pos += 1;
                    if self.eat_punct(";") {
                        return Ok(Stmt::Return(None));
                    }
                    let value = self.expr()?;
                    self.expect_punct(";")?;
                    return Ok(Stmt::Return(Some(value)));
                }
                "if" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.expr()?;
                    self.expect_punct(")")?;
                    let then_branch = Box::new(self.statement()?);
                    let else_branch = if self.eat_keyword("else") {
                        Some(Box::new(self.statement()?))
                    } else {
                        None
                    };
                    return Ok(Stmt::If {
                        cond,
                        then_branch,
                        else_branch,
                    });
                }
                "while" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.expr()?;
                    self.expect_punct(")")?;
                    let body = Box::new(self.statement()?);
                    return Ok(Stmt::While { cond, body });
                }
                "final" => {
                    self.pos += 1;
                    return self.local_decl();
                }
                kw if UNSUPPORTED_STATEMENTS.contains(&kw) => {
                    return self.error(format!("unsupported statement `{kw}`"));
                }
                kw if PRIMITIVE_KEYWORDS.contains(&kw) => return self.local_decl(),
                _ => {}
            }
        }
        if tok.kind == TokenKind::Identifier && self.looks_like_local_decl() {
            return self.local_decl();
        }
        let expr = self.expr()?;
        self.expect_punct(";")?;
        Ok(Stmt::Expr(expr))
    }

    /// `Type name` followed by `=`, `;` or `[`, where Type may be qualified,
    /// parameterized or an array.
    fn looks_like_local_decl(&self) -> bool {
        let mut i = self.pos;
        let at = |i: usize| &self.toks[i.min(self.toks.len() - 1)];
        if at(i).kind != TokenKind::Identifier {
            return false;
        }
        i += 1;
        while at(i).is_punct(".") && at(i + 1).kind == TokenKind::Identifier {
            i += 2;
        }
        if at(i).is_punct("<") {
            let mut depth = 0usize;
            loop {
                let t = at(i);
                if t.is_punct("<") {
                    depth += 1;
                } else if t.is_punct(">") {
                    depth -= 1;
                    if depth == 0 {
                        i += 1;
                        break;
                    }
                } else if !(t.kind == TokenKind::Identifier
                    || t.is_punct(",")
                    || t.is_punct(".")
                    || t.is_punct("?")
                    || t.is_punct("[")
                    || t.is_punct("]")
                    || t.is_keyword("extends")
                    || t.is_keyword("super"))
                {
                    return false;
                }
                i += 1;
            }
        }
        while at(i).is_punct("[") && at(i + 1).is_punct("]") {
            i += 2;
        }
        at(i).kind == TokenKind::Identifier
            && (at(i + 1).is_punct("=") || at(i + 1).is_punct(";") || at(i + 1).is_punct("["))
    }

    fn local_decl(&mut self) -> PResult<Stmt> {
        let ty = self.type_ref()?;
        if ty.name == "void" {
            return Err(ParseError {
                location: ty.location,
                message: "local variables cannot have type void".into(),
            });
        }
        let (name, _) = self.ident()?;
        while self.peek().is_punct("[") && self.peek_at(1).is_punct("]") {
            self.pos += 2;
        }
        let init = if self.eat_punct("=") {
            Some(self.expr()?)
        } else {
            None
        };
        if self.peek().is_punct(",") {
            return self.error("one variable per declaration");
        }
        self.expect_punct(";")?;
        Ok(Stmt::Local { ty, name, init })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let target = self.conditional()?;
        let tok = self.peek();
        if tok.kind == TokenKind::Punctuation && ASSIGN_OPS.contains(&tok.text.as_str()) {
            if !matches!(
                target,
                Expr::Name(..) | Expr::Field { .. } | Expr::Index { .. }
            ) {
                return self.error("invalid assignment target");
            }
            self.pos += 1;
            let value = self.expr()?;
            return Ok(Expr::Assign {
                target: Box::new(target),
                value: Box::new(value),
            });
        }
        if tok.is_punct("->") {
            return self.error("lambdas are not supported");
        }
        Ok(target)
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(0)?;
        if self.eat_punct("?") {
            let a = self.expr()?;
            self.expect_punct(":")?;
            let b = self.conditional()?;
            return Ok(Expr::Conditional(Box::new(cond), Box::new(a), Box::new(b)));
        }
        Ok(cond)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["|"],
            &["^"],
            &["&"],
            &["==", "!="],
            &["<", ">", "<=", ">="],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            let tok = self.peek();
            if tok.kind == TokenKind::Punctuation && LEVELS[level].contains(&tok.text.as_str()) {
                self.pos += 1;
                let rhs = self.binary(level + 1)?;
                lhs = Expr::Binary(Box::new(lhs), Box::new(rhs));
            } else if level == 6 && tok.is_keyword("instanceof") {
                self.pos += 1;
                let ty = self.type_ref()?;
                lhs = Expr::InstanceOf(Box::new(lhs), ty);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let tok = self.peek();
        if tok.kind == TokenKind::Punctuation
            && ["!", "-", "+", "~", "++", "--"].contains(&tok.text.as_str())
        {
            self.pos += 1;
            return Ok(Expr::Unary(Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_punct(")") {
                return Ok(args);
            }
            self.expect_punct(",")?;
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.primary()?;
        loop {
            if self.eat_punct(".") {
                let (name, location) = self.ident()?;
                if self.peek().is_punct("(") {
                    let args = self.args()?;
                    expr = Expr::Call {
                        receiver: Some(Box::new(expr)),
                        name,
                        args,
                        location,
                    };
                } else {
                    expr = Expr::Field {
                        target: Box::new(expr),
                        name,
                        location,
                    };
                }
            } else if self.eat_punct("[") {
                let index = self.expr()?;
                self.expect_punct("]")?;
                expr = Expr::Index {
                    target: Box::new(expr),
                    index: Box::new(index),
                };
            } else if self.peek().is_punct("++") || self.peek().is_punct("--") {
                self.pos += 1;
                expr = Expr::Unary(Box::new(expr));
            } else if self.peek().is_punct("::") {
                return self.error("method references are not supported");
            } else {
                return Ok(expr);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::NumberLiteral | TokenKind::StringLiteral => {
                self.pos += 1;
                Ok(Expr::Literal)
            }
            TokenKind::Identifier => {
                self.pos += 1;
                if self.peek().is_punct("(") {
                    let args = self.args()?;
                    Ok(Expr::Call {
                        receiver: None,
                        name: tok.text,
                        args,
                        location: tok.location,
                    })
                } else if self.peek().is_punct("->") {
                    self.error("lambdas are not supported")
                } else {
                    Ok(Expr::Name(tok.text, tok.location))
                }
            }
            TokenKind::Keyword => match tok.text.as_str() {
                "true" | "false" | "null" => {
                    self.pos += 1;
                    Ok(Expr::Literal)
                }
                "this" | "super" => {
                    self.pos += 1;
                    let target = if tok.text == "this" {
                        CtorTarget::This
                    } else {
                        CtorTarget::Super
                    };
                    if self.peek().is_punct("(") {
                        let args = self.args()?;
                        return Ok(Expr::CtorCall {
                            target,
                            args,
                            location: tok.location,
                        });
                    }
                    Ok(match target {
                        CtorTarget::This => Expr::This,
                        CtorTarget::Super => Expr::Super,
                    })
                }
                "new" => {
                    self.pos += 1;
                    let ty = self.new_type()?;
                    if self.peek().is_punct("[") {
                        let mut dims = Vec::new();
                        while self.eat_punct("[") {
                            if !self.eat_punct("]") {
                                dims.push(self.expr()?);
                                self.expect_punct("]")?;
                            }
                        }
                        return Ok(Expr::NewArray { ty, dims });
                    }
                    let args = self.args()?;
                    if self.peek().is_punct("{") {
                        return self.error("anonymous classes are not supported");
                    }
                    Ok(Expr::New { ty, args })
                }
                _ => self.error("expected expression"),
            },
            TokenKind::Punctuation if tok.text == "(" => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect_punct(")")?;
                if matches!(
                    self.peek().kind,
                    TokenKind::Identifier | TokenKind::NumberLiteral | TokenKind::StringLiteral
                ) || self.peek().is_keyword("this")
                    || self.peek().is_keyword("new")
                {
                    return self.error("casts are not supported");
                }
                Ok(inner)
            }
            _ => self.error("expected expression"),
        }
    }

    /// The type after `new`: like `type_ref` but leaves `[` for dimensions.
    fn new_type(&mut self) -> PResult<TypeRef> {
        let tok = self.peek().clone();
        if tok.kind == TokenKind::Keyword && PRIMITIVE_KEYWORDS.contains(&tok.text.as_str()) {
            self.pos += 1;
            return Ok(TypeRef {
                name: tok.text,
                location: tok.location,
            });
        }
        let (name, location) = self.qualified_name()?;
        self.skip_type_arguments()?;
        Ok(TypeRef { name, location })
    }
}
