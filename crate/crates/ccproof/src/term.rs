//! Ground first-order terms and the interning bank everything else is built
//! on. Terms are s-expressions over an open signature: any token can be a
//! head symbol, but once a symbol has been seen with an arity it keeps that
//! arity for the lifetime of the bank.

use std::collections::HashMap;
use std::fmt;

use crate::sexp::{self, Sexp, SexpError};

/// Handle into a [`TermBank`]. Ids are dense and stable: children are always
/// interned before parents and re-interning a term returns the original id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl TermId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// A term as a plain tree, the shape produced by parsing and consumed by
/// interning. `head` is the symbol, `args` its immediate subterms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub head: String,
    pub args: Vec<Term>,
}

impl Term {
    pub fn leaf(head: impl Into<String>) -> Term {
        Term { head: head.into(), args: Vec::new() }
    }

    pub fn app(head: impl Into<String>, args: Vec<Term>) -> Term {
        Term { head: head.into(), args }
    }

    /// Subterm at a child-index path; `&[]` is the term itself.
    pub fn at(&self, position: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in position {
            cur = cur.args.get(i)?;
        }
        Some(cur)
    }

    /// Copy of the term with the subterm at `position` replaced.
    pub fn replace_at(&self, position: &[usize], with: &Term) -> Option<Term> {
        match position {
            [] => Some(with.clone()),
            [i, rest @ ..] => {
                let mut copy = self.clone();
                let slot = copy.args.get_mut(*i)?;
                *slot = slot.replace_at(rest, with)?;
                Some(copy)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.head);
        }
        write!(f, "({}", self.head)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("empty expression")]
    EmptyExpression,
    #[error("trailing input after term")]
    TrailingInput,
    #[error("invalid character {0:?}")]
    InvalidToken(char),
    #[error("symbol {symbol} used with arity {found}, expected {expected}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("unknown term id {0}")]
    UnknownId(TermId),
}

impl From<SexpError> for TermError {
    fn from(e: SexpError) -> Self {
        match e {
            SexpError::UnbalancedParens => TermError::UnbalancedParens,
            SexpError::EmptyExpression => TermError::EmptyExpression,
            SexpError::TrailingInput => TermError::TrailingInput,
            SexpError::InvalidToken(c) => TermError::InvalidToken(c),
        }
    }
}

pub(crate) fn term_of_sexp(sexp: &Sexp) -> Result<Term, TermError> {
    match sexp {
        Sexp::Atom(a) => Ok(Term::leaf(a.clone())),
        Sexp::List(items) => {
            let Some((head, rest)) = items.split_first() else {
                return Err(TermError::EmptyExpression);
            };
            let Some(symbol) = head.as_atom() else {
                // A list in head position like `((f) a)`.
                return Err(TermError::EmptyExpression);
            };
            let args = rest.iter().map(term_of_sexp).collect::<Result<_, _>>()?;
            Ok(Term { head: symbol.to_string(), args })
        }
    }
}

/// Parse one complete term. Arity consistency is enforced within the parsed
/// expression; bank-wide consistency is checked at interning time.
pub fn parse_term(text: &str) -> Result<Term, TermError> {
    let term = term_of_sexp(&sexp::parse_one(text)?)?;
    let mut seen: HashMap<&str, usize> = HashMap::new();
    check_arities(&term, &mut seen)?;
    Ok(term)
}

fn check_arities<'t>(t: &'t Term, seen: &mut HashMap<&'t str, usize>) -> Result<(), TermError> {
    match seen.get(t.head.as_str()) {
        Some(&n) if n != t.args.len() => {
            return Err(TermError::ArityMismatch {
                symbol: t.head.clone(),
                expected: n,
                found: t.args.len(),
            });
        }
        Some(_) => {}
        None => {
            seen.insert(&t.head, t.args.len());
        }
    }
    for a in &t.args {
        check_arities(a, seen)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    head: u32, // index into `symbols`
    args: Vec<TermId>,
}

/// Append-only store of hash-consed terms. Structural equality of interned
/// terms coincides with id equality.
#[derive(Debug, Clone, Default)]
pub struct TermBank {
    symbols: Vec<String>,
    symbol_ids: HashMap<String, u32>,
    arities: HashMap<u32, usize>,
    nodes: Vec<Node>,
    memo: HashMap<Node, TermId>,
}

impl TermBank {
    pub fn new() -> TermBank {
        TermBank::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn symbol_id(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.symbol_ids.get(name) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(name.to_string());
        self.symbol_ids.insert(name.to_string(), id);
        id
    }

    /// Intern a term tree, reusing existing ids for shared structure.
    /// Rejects terms whose symbols disagree with arities already registered.
    pub fn intern_term(&mut self, term: &Term) -> Result<TermId, TermError> {
        let args = term
            .args
            .iter()
            .map(|a| self.intern_term(a))
            .collect::<Result<Vec<_>, _>>()?;
        self.intern_app(&term.head, args)
    }

    /// Intern an application of `head` to already-interned arguments.
    pub fn intern_app(&mut self, head: &str, args: Vec<TermId>) -> Result<TermId, TermError> {
        for &a in &args {
            if !self.contains(a) {
                return Err(TermError::UnknownId(a));
            }
        }
        let sym = self.symbol_id(head);
        match self.arities.get(&sym) {
            Some(&n) if n != args.len() => {
                return Err(TermError::ArityMismatch {
                    symbol: head.to_string(),
                    expected: n,
                    found: args.len(),
                });
            }
            Some(_) => {}
            None => {
                self.arities.insert(sym, args.len());
            }
        }
        let node = Node { head: sym, args };
        if let Some(&id) = self.memo.get(&node) {
            return Ok(id);
        }
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.memo.insert(node, id);
        Ok(id)
    }

    /// Parse and intern in one step.
    pub fn parse_and_intern(&mut self, text: &str) -> Result<TermId, TermError> {
        let term = parse_term(text)?;
        self.intern_term(&term)
    }

    /// Look up an already-interned term without mutating the bank.
    pub fn find_term(&self, term: &Term) -> Option<TermId> {
        let &sym = self.symbol_ids.get(&term.head)?;
        let args = term
            .args
            .iter()
            .map(|a| self.find_term(a))
            .collect::<Option<Vec<_>>>()?;
        self.memo.get(&Node { head: sym, args }).copied()
    }

    fn node(&self, id: TermId) -> Result<&Node, TermError> {
        self.nodes.get(id.idx()).ok_or(TermError::UnknownId(id))
    }

    pub fn head(&self, id: TermId) -> Result<&str, TermError> {
        Ok(&self.symbols[self.node(id)?.head as usize])
    }

    pub fn args(&self, id: TermId) -> Result<&[TermId], TermError> {
        Ok(&self.node(id)?.args)
    }

    pub fn contains(&self, id: TermId) -> bool {
        id.idx() < self.nodes.len()
    }

    /// Rebuild the plain tree for an interned term.
    pub fn term_of(&self, id: TermId) -> Result<Term, TermError> {
        let node = self.node(id)?;
        let args = node
            .args
            .iter()
            .map(|&a| self.term_of(a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Term { head: self.symbols[node.head as usize].clone(), args })
    }

    /// Canonical s-expression text for an interned term.
    pub fn print_term(&self, id: TermId) -> Result<String, TermError> {
        Ok(self.term_of(id)?.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_parse_print_roundtrip() {
        let mut bank = TermBank::new();
        for text in ["(+ a 0)", "a", "(f (+ a 0) (g (+ a 0) (+ 2 2)))", "(h x)"] {
            let id = bank.parse_and_intern(text).unwrap();
            assert_eq!(bank.print_term(id).unwrap(), text);
        }
    }

    #[test]
    fn test_intern_is_hash_consing() {
        let mut bank = TermBank::new();
        let a = bank.parse_and_intern("(+ a 0)").unwrap();
        let b = bank.parse_and_intern("(+ a 0)").unwrap();
        assert_eq!(a, b);
        // Shared subterm gets a shared id.
        let c = bank.parse_and_intern("(* (+ a 0) 1)").unwrap();
        assert_eq!(bank.args(c).unwrap()[0], a);
    }

    #[test]
    fn test_children_interned_before_parents() {
        let mut bank = TermBank::new();
        let id = bank.parse_and_intern("(f (g a) b)").unwrap();
        for &arg in bank.args(id).unwrap() {
            assert!(arg < id);
        }
    }

    #[test]
    fn test_arity_conflict_within_one_parse() {
        // First use pins the arity: the outer ternary f is seen first.
        let err = parse_term("(f (f a) a b)").unwrap_err();
        assert_eq!(
            err,
            TermError::ArityMismatch { symbol: "f".into(), expected: 3, found: 1 }
        );
    }

    #[test]
    fn test_arity_conflict_across_interns() {
        let mut bank = TermBank::new();
        bank.parse_and_intern("(f a)").unwrap();
        let err = bank.parse_and_intern("(f a b)").unwrap_err();
        assert_eq!(
            err,
            TermError::ArityMismatch { symbol: "f".into(), expected: 1, found: 2 }
        );
        // Constants are symbols of arity zero and equally pinned.
        let err = bank.parse_and_intern("(a b)").unwrap_err();
        assert!(matches!(err, TermError::ArityMismatch { .. }));
    }

    #[test]
    fn test_parse_errors() {
        assert_eq!(parse_term("(+ a").unwrap_err(), TermError::UnbalancedParens);
        assert_eq!(parse_term("").unwrap_err(), TermError::EmptyExpression);
        assert_eq!(parse_term("()").unwrap_err(), TermError::EmptyExpression);
        assert_eq!(parse_term("a b").unwrap_err(), TermError::TrailingInput);
        assert_eq!(parse_term("(f #)").unwrap_err(), TermError::InvalidToken('#'));
    }

    #[test]
    fn test_print_unknown_id() {
        let bank = TermBank::new();
        assert_eq!(
            bank.print_term(TermId(3)).unwrap_err(),
            TermError::UnknownId(TermId(3))
        );
    }

    #[test]
    fn test_token_alphabet() {
        // Operators, comparisons and dots are all ordinary symbols.
        let mut bank = TermBank::new();
        for text in ["(<= x y)", "(!? a)", "(a.b c-d e_f)", "(*/ 1 2)"] {
            let id = bank.parse_and_intern(text).unwrap();
            assert_eq!(bank.print_term(id).unwrap(), text);
        }
    }

    #[test]
    fn test_positions() {
        let t = parse_term("(f a (g b c))").unwrap();
        assert_eq!(t.at(&[1, 0]).unwrap().head, "b");
        let r = t.replace_at(&[1, 0], &Term::leaf("z")).unwrap();
        assert_eq!(r.to_string(), "(f a (g z c))");
        assert_eq!(t.at(&[2]), None);
    }

    #[test]
    fn test_roundtrip_exhaustive_small() {
        // parse ∘ print is the identity over a small enumerated term family.
        let mut bank = TermBank::new();
        let consts = ["a", "b", "c"];
        let mut texts: Vec<String> = consts.iter().map(|c| c.to_string()).collect();
        for l in consts {
            texts.push(format!("(u {l})"));
            for r in consts {
                texts.push(format!("(bin {l} {r})"));
                texts.push(format!("(bin (u {l}) {r})"));
            }
        }
        let mut ids = Vec::new();
        for text in &texts {
            let id = bank.parse_and_intern(text).unwrap();
            assert_eq!(&bank.print_term(id).unwrap(), text);
            ids.push(id);
        }
        // Distinct texts intern to distinct ids.
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), texts.len());
    }
}
