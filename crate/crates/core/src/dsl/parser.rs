use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{lex, Pos, Tok, Token};
use super::{Diagnostic, DiagnosticKind};
use crate::terms::{Func, Rational, RowSource, TypeTag};

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    at: usize,
    diags: Vec<Diagnostic>,
}

/// Parses a model document. All syntax errors are collected; parsing resumes
/// at the next statement after each one.
pub fn parse(text: &str) -> Result<Document, Vec<Diagnostic>> {
    let (toks, lex_errs) = lex(text);
    let mut p = Parser {
        toks,
        at: 0,
        diags: lex_errs
            .into_iter()
            .map(|e| Diagnostic { pos: e.pos, kind: DiagnosticKind::Lex(e.message) })
            .collect(),
    };
    let doc = p.document();
    if p.diags.is_empty() {
        Ok(doc)
    } else {
        p.diags.sort_by_key(|d| d.pos);
        Err(p.diags)
    }
}

/// Parses a single expression, as used for command-line overrides.
pub fn parse_expr(text: &str) -> Result<Expr, Vec<Diagnostic>> {
    let (toks, lex_errs) = lex(text);
    let mut p = Parser {
        toks,
        at: 0,
        diags: lex_errs
            .into_iter()
            .map(|e| Diagnostic { pos: e.pos, kind: DiagnosticKind::Lex(e.message) })
            .collect(),
    };
    match p.expr() {
        Ok(e) if p.diags.is_empty() => {
            if p.check(&Tok::Eof) {
                Ok(e)
            } else {
                Err(vec![p.error::<()>("end of input").unwrap_err()])
            }
        }
        Ok(_) => Err(p.diags),
        Err(d) => {
            p.diags.push(d);
            Err(p.diags)
        }
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn check(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.check(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(Diagnostic {
            pos: self.pos(),
            kind: DiagnosticKind::Syntax { expected: expected.to_string(), found: self.peek().to_string() },
        })
    }

    fn expect(&mut self, t: &Tok) -> PResult<Pos> {
        if self.check(t) {
            Ok(self.bump().pos)
        } else {
            self.error(&t.to_string())
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().pos;
                Ok((s, pos))
            }
            _ => self.error("identifier"),
        }
    }

    fn name(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Str(s) => {
                let pos = self.bump().pos;
                Ok((s, pos))
            }
            _ => self.ident(),
        }
    }

    fn nat(&mut self) -> PResult<(u64, Pos)> {
        match *self.peek() {
            Tok::Nat(k) => {
                let pos = self.bump().pos;
                Ok((k, pos))
            }
            _ => self.error("number"),
        }
    }

    fn node(&mut self) -> PResult<(u32, Pos)> {
        let (k, pos) = self.nat()?;
        u32::try_from(k).map(|k| (k, pos)).map_err(|_| Diagnostic {
            pos,
            kind: DiagnosticKind::Invalid(format!("node number {k} is too large")),
        })
    }

    /// Skips to just after the next `;` at this nesting level, or to a `}`
    /// closing the enclosing block (left in place unless `top`).
    fn synchronize(&mut self, top: bool) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth == 0 => {
                    if top {
                        self.bump();
                    }
                    return;
                }
                Tok::RBrace => {
                    depth -= 1;
                    if depth == 0 && top {
                        self.bump();
                        return;
                    }
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn document(&mut self) -> Document {
        let mut doc = Document::default();
        if self.eat(&Tok::Model) {
            match self.name() {
                Ok((n, _)) => {
                    doc.name = Some(n);
                    if let Err(d) = self.expect(&Tok::Semi) {
                        self.diags.push(d);
                        self.synchronize(true);
                    }
                }
                Err(d) => {
                    self.diags.push(d);
                    self.synchronize(true);
                }
            }
        }
        while !self.check(&Tok::Eof) {
            match self.item() {
                Ok(item) => doc.items.push(item),
                Err(d) => {
                    self.diags.push(d);
                    self.synchronize(true);
                }
            }
        }
        if !doc.items.iter().any(|i| matches!(i, Item::Process(_))) && self.diags.is_empty() {
            self.diags.push(Diagnostic {
                pos: self.pos(),
                kind: DiagnosticKind::Syntax {
                    expected: "at least one `process`".to_string(),
                    found: Tok::Eof.to_string(),
                },
            });
        }
        doc
    }

    fn item(&mut self) -> PResult<Item> {
        match self.peek() {
            Tok::Param => {
                self.bump();
                let (name, pos) = self.ident()?;
                self.expect(&Tok::Colon)?;
                let tpos = self.pos();
                let ty = self.ty()?;
                if ty != TypeTag::Nat {
                    return Err(Diagnostic {
                        pos: tpos,
                        kind: DiagnosticKind::Type(format!("parameter `{name}` must be a nat")),
                    });
                }
                self.expect(&Tok::Eq)?;
                let default = self.expr()?;
                let constraint = if self.eat(&Tok::Where) { Some(self.expr()?) } else { None };
                self.expect(&Tok::Semi)?;
                Ok(Item::Param(ParamDecl { name, pos, default, constraint }))
            }
            Tok::Input | Tok::Aux => {
                let is_input = self.bump().tok == Tok::Input;
                let (name, pos) = self.ident()?;
                self.expect(&Tok::Colon)?;
                let ty = self.ty()?;
                let value = if self.eat(&Tok::Eq) { Some(self.expr()?) } else { None };
                self.expect(&Tok::Semi)?;
                let d = GlobalDecl { name, pos, ty, value };
                Ok(if is_input { Item::Input(d) } else { Item::Aux(d) })
            }
            Tok::Process => {
                self.bump();
                let (name, pos) = self.ident()?;
                let family = self.family()?;
                self.expect(&Tok::LBrace)?;
                let mut body = Vec::new();
                while !self.check(&Tok::RBrace) && !self.check(&Tok::Eof) {
                    match self.proc_stmt() {
                        Ok(s) => body.push(s),
                        Err(d) => {
                            self.diags.push(d);
                            self.synchronize(false);
                        }
                    }
                }
                self.expect(&Tok::RBrace)?;
                Ok(Item::Process(ProcessDecl { name, pos, family, body }))
            }
            Tok::Invariant => {
                self.bump();
                let (name, pos) = self.name()?;
                let family = self.family()?;
                let scope = if self.eat(&Tok::When) { Some(self.expr()?) } else { None };
                self.expect(&Tok::Colon)?;
                let body = self.expr()?;
                self.expect(&Tok::Semi)?;
                Ok(Item::Invariant(InvariantDecl { name, pos, family, scope, body }))
            }
            _ => self.error("`param`, `input`, `aux`, `process` or `invariant`"),
        }
    }

    fn family(&mut self) -> PResult<Option<Family>> {
        if !self.eat(&Tok::LBracket) {
            return Ok(None);
        }
        let (var, _) = self.ident()?;
        self.expect(&Tok::In)?;
        let lo = self.additive()?;
        self.expect(&Tok::DotDot)?;
        let hi = self.additive()?;
        self.expect(&Tok::RBracket)?;
        Ok(Some(Family { var, lo, hi }))
    }

    fn ident_list(&mut self) -> PResult<Vec<(String, Pos)>> {
        let mut out = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?);
        }
        self.expect(&Tok::Semi)?;
        Ok(out)
    }

    fn proc_stmt(&mut self) -> PResult<ProcStmt> {
        match self.peek() {
            Tok::Inputs => {
                self.bump();
                Ok(ProcStmt::Inputs(self.ident_list()?))
            }
            Tok::Aux => {
                self.bump();
                Ok(ProcStmt::Aux(self.ident_list()?))
            }
            Tok::Var => {
                self.bump();
                let (name, pos) = self.ident()?;
                self.expect(&Tok::Colon)?;
                let ty = self.ty()?;
                let init = if self.eat(&Tok::Eq) { Some(self.expr()?) } else { None };
                self.expect(&Tok::Semi)?;
                Ok(ProcStmt::Var { name, pos, ty, init })
            }
            Tok::Init => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::Semi)?;
                Ok(ProcStmt::Init(e))
            }
            Tok::Start => {
                self.bump();
                let (v, pos) = self.node()?;
                self.expect(&Tok::Semi)?;
                Ok(ProcStmt::Start(v, pos))
            }
            Tok::Nodes => {
                self.bump();
                let mut out = vec![self.node()?];
                while self.eat(&Tok::Comma) {
                    out.push(self.node()?);
                }
                self.expect(&Tok::Semi)?;
                Ok(ProcStmt::Nodes(out))
            }
            Tok::Edge => {
                let pos = self.bump().pos;
                let (from, _) = self.node()?;
                self.expect(&Tok::Arrow)?;
                let (to, _) = self.node()?;
                self.expect(&Tok::LBrace)?;
                let mut eas = Vec::new();
                while !self.check(&Tok::RBrace) && !self.check(&Tok::Eof) {
                    match self.ea() {
                        Ok(ea) => eas.push(ea),
                        Err(d) => {
                            self.diags.push(d);
                            self.synchronize(false);
                        }
                    }
                }
                self.expect(&Tok::RBrace)?;
                Ok(ProcStmt::Edge(EdgeDecl { pos, from, to, eas }))
            }
            _ => self.error("`inputs`, `var`, `aux`, `init`, `start`, `nodes` or `edge`"),
        }
    }

    fn ea(&mut self) -> PResult<EaDecl> {
        let pos = self.pos();
        let kind = if self.eat(&Tok::LBracket) {
            let e = self.expr()?;
            self.expect(&Tok::RBracket)?;
            EaKind::Guard(e)
        } else if self.eat(&Tok::Aux) {
            let lhs = self.postfix()?;
            self.expect(&Tok::Assign)?;
            EaKind::Assign { lhs, rhs: self.expr()?, aux: true }
        } else {
            let head = self.postfix()?;
            match self.peek() {
                Tok::Bang => {
                    self.bump();
                    EaKind::Send { chan: head, msg: self.expr()? }
                }
                Tok::Question => {
                    self.bump();
                    EaKind::Recv { chan: head, pattern: self.expr()? }
                }
                Tok::Assign => {
                    self.bump();
                    EaKind::Assign { lhs: head, rhs: self.expr()?, aux: false }
                }
                _ => return self.error("`!`, `?` or `:=`"),
            }
        };
        self.expect(&Tok::Semi)?;
        Ok(EaDecl { pos, kind })
    }

    fn ty(&mut self) -> PResult<TypeTag> {
        if self.eat(&Tok::LParen) {
            if self.eat(&Tok::RParen) {
                return Ok(TypeTag::Tuple(Vec::new()));
            }
            let mut items = vec![self.ty()?];
            while self.eat(&Tok::Comma) {
                if self.check(&Tok::RParen) {
                    break;
                }
                items.push(self.ty()?);
            }
            self.expect(&Tok::RParen)?;
            return Ok(TypeTag::Tuple(items));
        }
        let pos = self.pos();
        let (name, _) = self.ident()?;
        Ok(match name.as_str() {
            "bool" => TypeTag::Bool,
            "nat" => TypeTag::Nat,
            "chan" => TypeTag::Chan,
            "row" => TypeTag::Row,
            "matrix" => TypeTag::Matrix,
            "node" => TypeTag::Node,
            "any" => TypeTag::Any,
            "set" | "array" => {
                self.expect(&Tok::Lt)?;
                let elem = self.ty()?;
                self.expect(&Tok::Gt)?;
                if name == "set" {
                    TypeTag::set_of(elem)
                } else {
                    TypeTag::array_of(elem)
                }
            }
            _ => {
                return Err(Diagnostic {
                    pos,
                    kind: DiagnosticKind::Unknown { what: "type", name },
                })
            }
        })
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.check(&Tok::Implies) {
            let pos = self.bump().pos;
            let rhs = self.expr()?;
            return Ok(Expr { kind: ExprKind::Binary(Func::Implies, Box::new(lhs), Box::new(rhs)), pos });
        }
        Ok(lhs)
    }

    fn left_assoc(&mut self, ops: &[(Tok, Func)], next: fn(&mut Self) -> PResult<Expr>) -> PResult<Expr> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (t, f) in ops {
                if self.check(t) {
                    let pos = self.bump().pos;
                    let rhs = next(self)?;
                    lhs = Expr { kind: ExprKind::Binary(f.clone(), Box::new(lhs), Box::new(rhs)), pos };
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn or(&mut self) -> PResult<Expr> {
        self.left_assoc(&[(Tok::OrOr, Func::Or)], Self::and)
    }

    fn and(&mut self) -> PResult<Expr> {
        self.left_assoc(&[(Tok::AndAnd, Func::And)], Self::comparison)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let f = match self.peek() {
            Tok::Eq => Func::Eq,
            Tok::Ne => Func::Ne,
            Tok::Lt => Func::Lt,
            Tok::Le => Func::Le,
            Tok::Gt => Func::Gt,
            Tok::Ge => Func::Ge,
            _ => return Ok(lhs),
        };
        let pos = self.bump().pos;
        let rhs = self.additive()?;
        Ok(Expr { kind: ExprKind::Binary(f, Box::new(lhs), Box::new(rhs)), pos })
    }

    fn additive(&mut self) -> PResult<Expr> {
        self.left_assoc(
            &[
                (Tok::Plus, Func::Add),
                (Tok::Minus, Func::Sub),
                (Tok::Union, Func::Union),
                (Tok::DisjUnion, Func::DisjointUnion),
                (Tok::SetMinus, Func::SetMinus),
            ],
            Self::intersection,
        )
    }

    fn intersection(&mut self) -> PResult<Expr> {
        self.left_assoc(&[(Tok::Intersect, Func::Intersect)], Self::unary)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.check(&Tok::Bang) {
            let pos = self.bump().pos;
            let e = self.unary()?;
            return Ok(Expr { kind: ExprKind::Not(Box::new(e)), pos });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.check(&Tok::LBracket) {
            let pos = self.bump().pos;
            let idx = self.expr()?;
            self.expect(&Tok::RBracket)?;
            e = Expr { kind: ExprKind::Index(Box::new(e), Box::new(idx)), pos };
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        out.push(self.expr()?);
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        self.expect(&Tok::RParen)?;
        Ok(out)
    }

    fn rational(&mut self) -> PResult<Rational> {
        let pos = self.pos();
        let neg = self.eat(&Tok::Minus);
        let (n, _) = self.nat()?;
        let d = if self.eat(&Tok::Slash) { self.nat()?.0 } else { 1 };
        let bad = |msg: &str| Diagnostic { pos, kind: DiagnosticKind::Invalid(msg.to_string()) };
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        let n = i64::try_from(n).map_err(|_| bad("numerator out of range"))?;
        let d = i64::try_from(d).map_err(|_| bad("denominator out of range"))?;
        Ok(Rational::new(if neg { -n } else { n }, d))
    }

    fn qrow_body(&mut self) -> PResult<Vec<Rational>> {
        self.expect(&Tok::LParen)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        out.push(self.rational()?);
        while self.eat(&Tok::Comma) {
            out.push(self.rational()?);
        }
        self.expect(&Tok::RParen)?;
        Ok(out)
    }

    fn process_ref(&mut self) -> PResult<(String, Option<Box<Expr>>)> {
        let (name, _) = self.ident()?;
        let index = if self.eat(&Tok::LBracket) {
            let e = self.expr()?;
            self.expect(&Tok::RBracket)?;
            Some(Box::new(e))
        } else {
            None
        };
        Ok((name, index))
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Nat(k) => {
                self.bump();
                ExprKind::Nat(k)
            }
            Tok::True => {
                self.bump();
                ExprKind::Bool(true)
            }
            Tok::False => {
                self.bump();
                ExprKind::Bool(false)
            }
            Tok::Star => {
                self.bump();
                ExprKind::Star
            }
            Tok::EmptySet => {
                self.bump();
                ExprKind::EmptySet
            }
            Tok::Bcast => {
                self.bump();
                ExprKind::Bcast
            }
            Tok::C => {
                self.bump();
                self.expect(&Tok::LBracket)?;
                let e = self.expr()?;
                self.expect(&Tok::RBracket)?;
                ExprKind::Chan(Box::new(e))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok(Expr { kind: ExprKind::Tuple(Vec::new()), pos });
                }
                let first = self.expr()?;
                if self.eat(&Tok::RParen) {
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat(&Tok::Comma) {
                    if self.check(&Tok::RParen) {
                        break;
                    }
                    items.push(self.expr()?);
                }
                self.expect(&Tok::RParen)?;
                ExprKind::Tuple(items)
            }
            Tok::LBrace => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    items.push(self.expr()?);
                    while self.eat(&Tok::Comma) {
                        items.push(self.expr()?);
                    }
                    self.expect(&Tok::RBrace)?;
                }
                ExprKind::Set(items)
            }
            Tok::LBracket => {
                self.bump();
                let mut cells = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        if self.eat(&Tok::Underscore) {
                            cells.push(None);
                        } else {
                            cells.push(Some(self.expr()?));
                        }
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(&Tok::RBracket)?;
                }
                ExprKind::Array(cells)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    match name.as_str() {
                        "row" => {
                            let (src, spos) = self.ident()?;
                            let source = match src.as_str() {
                                "A" => RowSource::A,
                                "AB" => RowSource::Prod,
                                _ => {
                                    return Err(Diagnostic {
                                        pos: spos,
                                        kind: DiagnosticKind::Syntax {
                                            expected: "`A` or `AB`".to_string(),
                                            found: format!("identifier `{src}`"),
                                        },
                                    })
                                }
                            };
                            self.expect(&Tok::Comma)?;
                            let index = self.expr()?;
                            self.expect(&Tok::RParen)?;
                            ExprKind::Row { source, index: Box::new(index) }
                        }
                        "matrix" => {
                            let (m, _) = self.ident()?;
                            self.expect(&Tok::RParen)?;
                            ExprKind::Matrix(m)
                        }
                        "at" => {
                            let (process, index) = self.process_ref()?;
                            self.expect(&Tok::RParen)?;
                            ExprKind::At { process, index }
                        }
                        "qrow" => {
                            self.at -= 1;
                            ExprKind::QRow(self.qrow_body()?)
                        }
                        "qmatrix" => {
                            let mut rows = Vec::new();
                            if !self.eat(&Tok::RParen) {
                                loop {
                                    match self.peek() {
                                        Tok::Ident(q) if q == "qrow" => {
                                            self.bump();
                                        }
                                        _ => return self.error("`qrow`"),
                                    }
                                    rows.push(self.qrow_body()?);
                                    if !self.eat(&Tok::Comma) {
                                        break;
                                    }
                                }
                                self.expect(&Tok::RParen)?;
                            }
                            ExprKind::QMatrix(rows)
                        }
                        _ => ExprKind::Call { name, args: self.args()? },
                    }
                } else if self.check(&Tok::Dot) {
                    self.bump();
                    let (var, _) = self.ident()?;
                    ExprKind::Member { process: name, index: None, var }
                } else if self.check(&Tok::LBracket) && matches!(self.member_after_bracket(), Some(true)) {
                    self.bump();
                    let idx = self.expr()?;
                    self.expect(&Tok::RBracket)?;
                    self.expect(&Tok::Dot)?;
                    let (var, _) = self.ident()?;
                    ExprKind::Member { process: name, index: Some(Box::new(idx)), var }
                } else {
                    ExprKind::Name(name)
                }
            }
            _ => return self.error("expression"),
        };
        Ok(Expr { kind, pos })
    }

    /// Looks past a balanced `[...]` for a `.`, distinguishing `P[w].x`
    /// from indexing.
    fn member_after_bracket(&self) -> Option<bool> {
        let mut depth = 0usize;
        let mut k = 0;
        loop {
            match self.peek_at(k) {
                Tok::LBracket => depth += 1,
                Tok::RBracket => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(*self.peek_at(k + 1) == Tok::Dot);
                    }
                }
                Tok::Eof | Tok::Semi => return None,
                _ => {}
            }
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> Expr {
        let (toks, errs) = lex(s);
        assert!(errs.is_empty());
        let mut p = Parser { toks, at: 0, diags: Vec::new() };
        let e = p.expr().unwrap();
        assert_eq!(*p.peek(), Tok::Eof, "trailing input in {s}");
        e
    }

    fn shape(e: &Expr) -> String {
        match &e.kind {
            ExprKind::Nat(k) => format!("{k}"),
            ExprKind::Name(x) => x.clone(),
            ExprKind::Binary(f, a, b) => format!("({} {} {})", shape(a), f.name(), shape(b)),
            ExprKind::Not(a) => format!("!{}", shape(a)),
            ExprKind::Index(a, b) => format!("{}[{}]", shape(a), shape(b)),
            ExprKind::Member { process, index: Some(i), var } => format!("{process}[{}].{var}", shape(i)),
            ExprKind::Call { name, args } => format!("{name}/{}", args.len()),
            ExprKind::Tuple(items) => format!("tuple/{}", items.len()),
            other => format!("{other:?}"),
        }
    }

    #[test]
    fn precedence() {
        assert_eq!(shape(&expr("a + b = x && !d || e => f => g")), "(((((a + b) = x) && !d) || e) => (f => g))");
        assert_eq!(shape(&expr("x ++ y /\\ z")), "(x ++ (y /\\ z))");
        assert_eq!(shape(&expr("A[i][j]")), "A[i][j]");
        assert_eq!(shape(&expr("P[w].j")), "P[w].j");
        assert_eq!(shape(&expr("min(n, N)")), "min/2");
        assert_eq!(shape(&expr("(a,)")), "tuple/1");
    }

    #[test]
    fn literals() {
        assert_eq!(expr("qrow(1/2, -3)").kind, ExprKind::QRow(vec![Rational::new(1, 2), Rational::from_integer(-3)]));
        assert!(matches!(expr("row(AB, 2)").kind, ExprKind::Row { source: RowSource::Prod, .. }));
        assert!(matches!(expr("[_, 1]").kind, ExprKind::Array(ref c) if c[0].is_none()));
        assert!(matches!(expr("at(P[2])").kind, ExprKind::At { .. }));
        assert!(matches!(expr("qmatrix(qrow(1), qrow(2))").kind, ExprKind::QMatrix(ref r) if r.len() == 2));
    }

    #[test]
    fn empty_document() {
        let errs = parse("").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!((errs[0].pos.line, errs[0].pos.col), (1, 1));
    }

    #[test]
    fn recovers_per_statement() {
        let text = "process P {\n  var x : nat = ;\n  edge 0 -> 1 { x := ; [x > 0]; }\n  start zero;\n}\n";
        let errs = parse(text).unwrap_err();
        let lines: Vec<u32> = errs.iter().map(|d| d.pos.line).collect();
        assert_eq!(lines, vec![2, 3, 4]);
    }
}
