//! Minimal s-expression reader shared by the term, certificate and instance
//! parsers. Atoms are restricted to the token alphabet the rest of the crate
//! understands; everything else is a syntax error at this layer.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::Atom(_) => None,
            Sexp::List(items) => Some(items),
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s) => write!(f, "{s}"),
            Sexp::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SexpError {
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("empty expression")]
    EmptyExpression,
    #[error("trailing input after expression")]
    TrailingInput,
    #[error("invalid character {0:?}")]
    InvalidToken(char),
}

pub fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "_+*/.<>=!?-".contains(c)
}

struct Tokens<'a> {
    rest: &'a str,
}

#[derive(Debug, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { rest: text }
    }

    /// Next token, or `None` at end of input. `;` starts a comment that runs
    /// to end of line.
    fn next(&mut self) -> Result<Option<Tok>, SexpError> {
        loop {
            self.rest = self.rest.trim_start();
            if let Some(stripped) = self.rest.strip_prefix(';') {
                match stripped.find('\n') {
                    Some(i) => self.rest = &stripped[i + 1..],
                    None => self.rest = "",
                }
                continue;
            }
            break;
        }
        let mut chars = self.rest.chars();
        let Some(c) = chars.next() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.rest = chars.as_str();
                Ok(Some(Tok::Open))
            }
            ')' => {
                self.rest = chars.as_str();
                Ok(Some(Tok::Close))
            }
            c if is_atom_char(c) => {
                let end = self
                    .rest
                    .find(|ch| !is_atom_char(ch))
                    .unwrap_or(self.rest.len());
                let (atom, rest) = self.rest.split_at(end);
                self.rest = rest;
                Ok(Some(Tok::Atom(atom.to_string())))
            }
            other => Err(SexpError::InvalidToken(other)),
        }
    }
}

fn parse_from(tokens: &mut Tokens<'_>) -> Result<Sexp, SexpError> {
    match tokens.next()? {
        None => Err(SexpError::EmptyExpression),
        Some(Tok::Atom(a)) => Ok(Sexp::Atom(a)),
        Some(Tok::Close) => Err(SexpError::UnbalancedParens),
        Some(Tok::Open) => {
            let mut items = Vec::new();
            loop {
                // Peek by cloning the cursor: cheap since it is a slice.
                let save = tokens.rest;
                match tokens.next()? {
                    None => return Err(SexpError::UnbalancedParens),
                    Some(Tok::Close) => return Ok(Sexp::List(items)),
                    Some(_) => {
                        tokens.rest = save;
                        items.push(parse_from(tokens)?);
                    }
                }
            }
        }
    }
}

/// Parse exactly one s-expression; anything but whitespace or comments after
/// it is an error.
pub fn parse_one(text: &str) -> Result<Sexp, SexpError> {
    let mut tokens = Tokens::new(text);
    let sexp = parse_from(&mut tokens)?;
    match tokens.next()? {
        None => Ok(sexp),
        Some(_) => Err(SexpError::TrailingInput),
    }
}

/// Parse a sequence of s-expressions until end of input.
pub fn parse_many(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut tokens = Tokens::new(text);
    let mut out = Vec::new();
    loop {
        let save = tokens.rest;
        match tokens.next()? {
            None => return Ok(out),
            Some(_) => {
                tokens.rest = save;
                out.push(parse_from(&mut tokens)?);
            }
        }
    }
}
