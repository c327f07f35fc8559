use super::{ParseError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Dot,
    Comma,
    Colon,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Equals,
    Amp,
    Bar,
    Arrow,
    Turnstile,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) const KEYWORDS: &[&str] =
    &["sort", "fun", "rel", "const", "axiom", "top", "bot", "exists", "forall", "not"];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Cursor {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Cursor {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn advance(&mut self) {
        if self.chars[self.i] == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        self.i += 1;
    }
}

/// Splits the input into tokens. `#` comments run to end of line and
/// `(* ... *)` comments may span lines.
pub(crate) fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut cur = Cursor { chars: src.chars().collect(), i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(c) = cur.peek(0) {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.advance();
            continue;
        }
        if c == '#' {
            while cur.peek(0).is_some_and(|c| c != '\n') {
                cur.advance();
            }
            continue;
        }
        if c == '(' && cur.peek(1) == Some('*') {
            cur.advance();
            cur.advance();
            loop {
                match (cur.peek(0), cur.peek(1)) {
                    (None, _) => {
                        return Err(ParseError::Syntax { pos, message: "unterminated comment".into() });
                    }
                    (Some('*'), Some(')')) => {
                        cur.advance();
                        cur.advance();
                        break;
                    }
                    _ => cur.advance(),
                }
            }
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(c) = cur.peek(0).filter(|c| is_ident_char(*c)) {
                s.push(c);
                cur.advance();
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        let (tok, width) = match (c, cur.peek(1)) {
            ('|', Some('-')) => (Tok::Turnstile, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('|', _) => (Tok::Bar, 1),
            ('&', _) => (Tok::Amp, 1),
            ('=', _) => (Tok::Equals, 1),
            ('.', _) => (Tok::Dot, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            _ => {
                return Err(ParseError::Syntax { pos, message: format!("unexpected character `{c}`") });
            }
        };
        for _ in 0..width {
            cur.advance();
        }
        out.push((tok, pos));
    }
    out.push((Tok::Eof, cur.pos()));
    Ok(out)
}
