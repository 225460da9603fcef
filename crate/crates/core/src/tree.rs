use std::fmt;

use crate::automaton::{RankedAlphabet, SymbolId};

/// A finite closed tree: every node has exactly `rank(symbol)` children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub symbol: SymbolId,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(symbol: SymbolId) -> Self {
        Tree {
            symbol,
            children: Vec::new(),
        }
    }

    pub fn node(symbol: SymbolId, children: Vec<Tree>) -> Self {
        Tree { symbol, children }
    }

    /// Number of nodes on the longest root-to-leaf path; a single leaf has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Tree::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn is_closed(&self, alphabet: &RankedAlphabet) -> bool {
        self.symbol.index() < alphabet.len()
            && alphabet.rank(self.symbol) == self.children.len()
            && self.children.iter().all(|c| c.is_closed(alphabet))
    }

    /// Parses terms such as `a(b,a(b,b))` against `alphabet`.
    pub fn parse(alphabet: &RankedAlphabet, text: &str) -> Result<Tree, String> {
        let mut p = TermParser {
            s: text.as_bytes(),
            pos: 0,
            alphabet,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(format!("trailing input at byte {}", p.pos));
        }
        Ok(t)
    }

    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> impl fmt::Display + 'a {
        TreeDisplay {
            tree: self,
            alphabet,
        }
    }
}

struct TreeDisplay<'a> {
    tree: &'a Tree,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for TreeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alphabet.name(self.tree.symbol))?;
        if !self.tree.children.is_empty() {
            write!(f, "(")?;
            for (i, c) in self.tree.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", c.display(self.alphabet))?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

struct TermParser<'a> {
    s: &'a [u8],
    pos: usize,
    alphabet: &'a RankedAlphabet,
}

impl TermParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Tree, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && !matches!(self.s[self.pos], b'(' | b')' | b',')
            && !self.s[self.pos].is_ascii_whitespace()
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).map_err(|e| e.to_string())?;
        if name.is_empty() {
            return Err(format!("expected a symbol at byte {start}"));
        }
        let symbol = self
            .alphabet
            .lookup(name)
            .ok_or_else(|| format!("unknown symbol `{name}`"))?;
        let mut children = Vec::new();
        self.skip_ws();
        if self.pos < self.s.len() && self.s[self.pos] == b'(' {
            self.pos += 1;
            loop {
                children.push(self.term()?);
                self.skip_ws();
                match self.s.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(format!("expected `,` or `)` at byte {}", self.pos)),
                }
            }
        }
        if children.len() != self.alphabet.rank(symbol) {
            return Err(format!(
                "`{name}` has rank {} but {} children",
                self.alphabet.rank(symbol),
                children.len()
            ));
        }
        Ok(Tree { symbol, children })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let alphabet = RankedAlphabet::from_pairs(&[("a", 2), ("b", 0), ("c", 1)]).unwrap();
        let t = Tree::parse(&alphabet, "a(b, c(b))").unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(t.size(), 4);
        assert_eq!(t.display(&alphabet).to_string(), "a(b,c(b))");
        assert!(t.is_closed(&alphabet));
        assert!(Tree::parse(&alphabet, "a(b)").is_err());
        assert!(Tree::parse(&alphabet, "z").is_err());
    }
}
