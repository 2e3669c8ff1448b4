use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// 1-based line and column of a token's first character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    Str(String),
    // keywords
    Model,
    Param,
    Input,
    Aux,
    Process,
    Var,
    Inputs,
    Init,
    Start,
    Nodes,
    Edge,
    Invariant,
    When,
    Where,
    In,
    True,
    False,
    C,
    Bcast,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    DotDot,
    Arrow,
    Assign,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Question,
    Implies,
    Plus,
    Minus,
    Union,
    DisjUnion,
    SetMinus,
    Intersect,
    Slash,
    Star,
    Underscore,
    EmptySet,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{x}`"),
            Tok::Nat(k) => return write!(f, "number {k}"),
            Tok::Str(s) => return write!(f, "string {s:?}"),
            Tok::Model => "`model`",
            Tok::Param => "`param`",
            Tok::Input => "`input`",
            Tok::Aux => "`aux`",
            Tok::Process => "`process`",
            Tok::Var => "`var`",
            Tok::Inputs => "`inputs`",
            Tok::Init => "`init`",
            Tok::Start => "`start`",
            Tok::Nodes => "`nodes`",
            Tok::Edge => "`edge`",
            Tok::Invariant => "`invariant`",
            Tok::When => "`when`",
            Tok::Where => "`where`",
            Tok::In => "`in`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::C => "`c`",
            Tok::Bcast => "`bcast`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::DotDot => "`..`",
            Tok::Arrow => "`->`",
            Tok::Assign => "`:=`",
            Tok::Eq => "`=`",
            Tok::Ne => "`!=`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::AndAnd => "`&&`",
            Tok::OrOr => "`||`",
            Tok::Bang => "`!`",
            Tok::Question => "`?`",
            Tok::Implies => "`=>`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Union => "`\\/`",
            Tok::DisjUnion => "`++`",
            Tok::SetMinus => "`\\`",
            Tok::Intersect => "`/\\`",
            Tok::Slash => "`/`",
            Tok::Star => "`*`",
            Tok::Underscore => "`_`",
            Tok::EmptySet => "`∅`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "model" => Tok::Model,
        "param" => Tok::Param,
        "input" => Tok::Input,
        "aux" => Tok::Aux,
        "process" => Tok::Process,
        "var" => Tok::Var,
        "inputs" => Tok::Inputs,
        "init" => Tok::Init,
        "start" => Tok::Start,
        "nodes" => Tok::Nodes,
        "edge" => Tok::Edge,
        "invariant" => Tok::Invariant,
        "when" => Tok::When,
        "where" => Tok::Where,
        "in" => Tok::In,
        "true" => Tok::True,
        "false" => Tok::False,
        "c" => Tok::C,
        "bcast" => Tok::Bcast,
        _ => return None,
    })
}

struct Cursor<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    pos: Pos,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }
}

/// Splits the text into tokens. Unrecognised characters are reported and
/// skipped so that later errors are still found.
pub fn lex(text: &str) -> (Vec<Token>, Vec<LexError>) {
    let mut cur = Cursor { chars: text.chars().peekable(), pos: Pos { line: 1, col: 1 } };
    let mut toks = Vec::new();
    let mut errs = Vec::new();
    loop {
        // whitespace and comments
        loop {
            match cur.peek() {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('/') => {
                    let mut ahead = cur.chars.clone();
                    ahead.next();
                    match ahead.peek() {
                        Some('/') => {
                            while cur.peek().is_some_and(|c| c != '\n') {
                                cur.bump();
                            }
                        }
                        Some('*') => {
                            let start = cur.pos;
                            cur.bump();
                            cur.bump();
                            let mut closed = false;
                            while let Some(c) = cur.bump() {
                                if c == '*' && cur.eat('/') {
                                    closed = true;
                                    break;
                                }
                            }
                            if !closed {
                                errs.push(LexError { pos: start, message: "unterminated block comment".to_string() });
                            }
                        }
                        _ => break,
                    }
                }
                _ => break,
            }
        }
        let pos = cur.pos;
        let Some(c) = cur.bump() else {
            toks.push(Token { tok: Tok::Eof, pos });
            return (toks, errs);
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '?' => Tok::Question,
            '*' => Tok::Star,
            '.' if cur.eat('.') => Tok::DotDot,
            '.' => Tok::Dot,
            ':' if cur.eat('=') => Tok::Assign,
            ':' => Tok::Colon,
            '-' if cur.eat('>') => Tok::Arrow,
            '-' => Tok::Minus,
            '=' if cur.eat('>') => Tok::Implies,
            '=' => Tok::Eq,
            '!' if cur.eat('=') => Tok::Ne,
            '!' => Tok::Bang,
            '<' if cur.eat('=') => Tok::Le,
            '<' => Tok::Lt,
            '>' if cur.eat('=') => Tok::Ge,
            '>' => Tok::Gt,
            '+' if cur.eat('+') => Tok::DisjUnion,
            '+' => Tok::Plus,
            '\\' if cur.eat('/') => Tok::Union,
            '\\' => Tok::SetMinus,
            '/' if cur.eat('\\') => Tok::Intersect,
            '/' => Tok::Slash,
            '&' if cur.eat('&') => Tok::AndAnd,
            '|' if cur.eat('|') => Tok::OrOr,
            '⊔' => Tok::DisjUnion,
            '∪' => Tok::Union,
            '∖' => Tok::SetMinus,
            '∩' => Tok::Intersect,
            '⇒' => Tok::Implies,
            '∧' => Tok::AndAnd,
            '∨' => Tok::OrOr,
            '¬' => Tok::Bang,
            '≤' => Tok::Le,
            '≥' => Tok::Ge,
            '≠' => Tok::Ne,
            '→' => Tok::Arrow,
            '∅' => Tok::EmptySet,
            '"' => {
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = cur.bump() {
                    if c == '"' {
                        closed = true;
                        break;
                    }
                    if c == '\n' {
                        break;
                    }
                    s.push(c);
                }
                if !closed {
                    errs.push(LexError { pos, message: "unterminated string".to_string() });
                }
                Tok::Str(s)
            }
            c if c.is_ascii_digit() => {
                let mut k = u64::from(c as u8 - b'0');
                let mut overflow = false;
                while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
                    cur.bump();
                    match k.checked_mul(10).and_then(|k| k.checked_add(u64::from(d as u8 - b'0'))) {
                        Some(v) => k = v,
                        None => overflow = true,
                    }
                }
                if overflow {
                    errs.push(LexError { pos, message: "number does not fit in 64 bits".to_string() });
                }
                Tok::Nat(k)
            }
            c if c == '_' || c.is_alphabetic() => {
                let mut s = String::new();
                s.push(c);
                while let Some(d) = cur.peek().filter(|d| *d == '_' || d.is_alphanumeric() || *d == '\'') {
                    cur.bump();
                    s.push(d);
                }
                if s == "_" {
                    Tok::Underscore
                } else {
                    keyword(&s).unwrap_or(Tok::Ident(s))
                }
            }
            other => {
                errs.push(LexError { pos, message: alloc::format!("unexpected character {other:?}") });
                continue;
            }
        };
        toks.push(Token { tok, pos });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn kinds(s: &str) -> Vec<Tok> {
        let (t, e) = lex(s);
        assert!(e.is_empty(), "{e:?}");
        t.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators() {
        assert_eq!(
            kinds("a ++ b \\/ c_1 \\ d /\\ e => f := g -> h != i"),
            vec![
                Tok::Ident("a".into()),
                Tok::DisjUnion,
                Tok::Ident("b".into()),
                Tok::Union,
                Tok::Ident("c_1".into()),
                Tok::SetMinus,
                Tok::Ident("d".into()),
                Tok::Intersect,
                Tok::Ident("e".into()),
                Tok::Implies,
                Tok::Ident("f".into()),
                Tok::Assign,
                Tok::Ident("g".into()),
                Tok::Arrow,
                Tok::Ident("h".into()),
                Tok::Ne,
                Tok::Ident("i".into()),
                Tok::Eof
            ]
        );
        assert_eq!(kinds("α ⊔ {i}")[1], Tok::DisjUnion);
    }

    #[test]
    fn positions_and_comments() {
        let (t, _) = lex("// header\n  edge /* x */ 0");
        assert_eq!(t[0].pos, Pos { line: 2, col: 3 });
        assert_eq!(t[1].tok, Tok::Nat(0));
        assert_eq!(t[1].pos, Pos { line: 2, col: 16 });
    }

    #[test]
    fn bad_characters_are_reported_and_skipped() {
        let (t, e) = lex("a $ b");
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].pos, Pos { line: 1, col: 3 });
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn underscore_and_keywords() {
        assert_eq!(kinds("_ _x c bcast"), vec![Tok::Underscore, Tok::Ident("_x".into()), Tok::C, Tok::Bcast, Tok::Eof]);
    }
}
