use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::automaton::{RankedAlphabet, StateId, Transition, TreeAutomaton};
use crate::error::ModelError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: symbol `{symbol}` has rank {expected}, used with {found} children")]
    Arity {
        line: usize,
        col: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: undeclared symbol `{symbol}`")]
    UndeclaredSymbol {
        line: usize,
        col: usize,
        symbol: String,
    },
    #[error("{line}:{col}: undeclared state `{state}`")]
    UndeclaredState {
        line: usize,
        col: usize,
        state: String,
    },
    #[error("{0}")]
    Model(String),
}

/// A parsed Timbuk file: the automaton plus the names used in the text.
#[derive(Clone, Debug)]
pub struct TimbukDocument {
    pub name: String,
    pub state_names: Vec<String>,
    pub automaton: TreeAutomaton,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    Comma,
    Arrow,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (li + 1, i + 1);
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                _ => None,
            };
            if c.is_whitespace() {
                i += 1;
            } else if let Some(tok) = single {
                out.push(Token { tok, line, col });
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(Token {
                    tok: Tok::Arrow,
                    line,
                    col,
                });
                i += 2;
            } else {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && !matches!(chars[i], '(' | ')' | ',')
                    && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>'))
                {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line,
                    col,
                });
            }
        }
    }
    out
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Some(Token {
                tok: Tok::Word(w), ..
            }) => Some(w),
            _ => None,
        }
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => self.toks.last().map_or((1, 1), |t| (t.line, t.col + 1)),
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.peek_word() == Some(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{kw}`")))
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().map(|t| &t.tok) == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn word(&mut self) -> Result<(String, usize, usize), ParseError> {
        match self.peek().cloned() {
            Some(Token {
                tok: Tok::Word(w),
                line,
                col,
            }) => {
                self.pos += 1;
                Ok((w, line, col))
            }
            _ => Err(self.err("expected a name")),
        }
    }

    /// Words up to (not including) any of `stops`, or a non-word token.
    fn words_until(&mut self, stops: &[&str]) -> Vec<(String, usize, usize)> {
        let mut out = Vec::new();
        while let Some(w) = self.peek_word() {
            if stops.contains(&w) {
                break;
            }
            out.push(self.word().expect("peeked a word"));
        }
        out
    }
}

/// Parses a Timbuk document. Bottom-up rules `a(q1,q2) -> q` become top-down
/// transitions `<q, a, q1 q2>` and final states become initial states.
pub fn parse_timbuk(text: &str) -> Result<TreeAutomaton, ParseError> {
    parse_timbuk_document(text).map(|d| d.automaton)
}

pub fn parse_timbuk_document(text: &str) -> Result<TimbukDocument, ParseError> {
    let mut p = Parser {
        toks: lex(text),
        pos: 0,
    };

    p.keyword("Ops")?;
    let mut alphabet = RankedAlphabet::new();
    for (w, line, col) in p.words_until(&["Automaton"]) {
        let bad = || ParseError::Syntax {
            line,
            col,
            msg: format!("expected `symbol:rank`, found `{w}`"),
        };
        let (name, rank) = w.rsplit_once(':').ok_or_else(bad)?;
        let rank: usize = rank.parse().map_err(|_| bad())?;
        alphabet.add(name, rank).map_err(|e| ParseError::Syntax {
            line,
            col,
            msg: e.to_string(),
        })?;
    }

    p.keyword("Automaton")?;
    let (name, _, _) = p.word()?;

    p.keyword("States")?;
    let mut state_names = Vec::new();
    let mut states: HashMap<String, usize> = HashMap::new();
    for (w, line, col) in p.words_until(&["Final"]) {
        // an optional `:0` arity suffix is allowed on state names
        let base = match w.rsplit_once(':') {
            Some((b, r)) if r.chars().all(|c| c.is_ascii_digit()) && !b.is_empty() => b.to_string(),
            _ => w,
        };
        if states.insert(base.clone(), state_names.len()).is_some() {
            return Err(ParseError::Syntax {
                line,
                col,
                msg: format!("state `{base}` declared twice"),
            });
        }
        state_names.push(base);
    }

    p.keyword("Final")?;
    p.keyword("States")?;
    let lookup_state = |w: &str, line, col| {
        let base = w.rsplit_once(':').map_or(w, |(b, _)| b);
        states
            .get(base)
            .copied()
            .ok_or_else(|| ParseError::UndeclaredState {
                line,
                col,
                state: base.to_string(),
            })
    };
    let mut initial = Vec::new();
    for (w, line, col) in p.words_until(&["Transitions"]) {
        initial.push(StateId::from(lookup_state(&w, line, col)?));
    }

    p.keyword("Transitions")?;
    let mut transitions = Vec::new();
    while p.peek().is_some() {
        let (sym_name, line, col) = p.word()?;
        let sym = alphabet
            .lookup(&sym_name)
            .ok_or_else(|| ParseError::UndeclaredSymbol {
                line,
                col,
                symbol: sym_name.clone(),
            })?;
        let mut targets = Vec::new();
        if p.peek().map(|t| &t.tok) == Some(&Tok::LParen) {
            p.pos += 1;
            if p.peek().map(|t| &t.tok) != Some(&Tok::RParen) {
                loop {
                    let (w, l, c) = p.word()?;
                    targets.push(StateId::from(lookup_state(&w, l, c)?));
                    if p.peek().map(|t| &t.tok) == Some(&Tok::Comma) {
                        p.pos += 1;
                    } else {
                        break;
                    }
                }
            }
            p.expect(Tok::RParen, "`)`")?;
        }
        let expected = alphabet.rank(sym);
        if expected != targets.len() {
            return Err(ParseError::Arity {
                line,
                col,
                symbol: sym_name,
                expected,
                found: targets.len(),
            });
        }
        p.expect(Tok::Arrow, "`->`")?;
        let (w, l, c) = p.word()?;
        let source = StateId::from(lookup_state(&w, l, c)?);
        transitions.push(Transition::new(source, sym, targets));
    }

    let mut builder = TreeAutomaton::builder(Arc::new(alphabet), state_names.len());
    builder.initial = initial;
    builder.transitions = transitions;
    let automaton = builder
        .build()
        .map_err(|e: ModelError| ParseError::Model(e.to_string()))?;
    Ok(TimbukDocument {
        name,
        state_names,
        automaton,
    })
}

/// Writes `a` in Timbuk syntax with states named `q0, q1, ...`. Output is
/// deterministic: states by index, transitions in the automaton's order.
pub fn serialize_timbuk(a: &TreeAutomaton, name: &str) -> String {
    let al = a.alphabet();
    let mut s = String::from("Ops");
    for (_, sym) in al.iter() {
        let _ = write!(s, " {}:{}", sym.name, sym.rank);
    }
    let _ = write!(s, "\n\nAutomaton {name}\nStates");
    for q in a.states() {
        let _ = write!(s, " {q}");
    }
    s.push_str("\nFinal States");
    for q in a.initial_states() {
        let _ = write!(s, " {q}");
    }
    s.push_str("\nTransitions\n");
    for t in a.transitions() {
        s.push_str(al.name(t.symbol));
        if !t.targets.is_empty() {
            s.push('(');
            for (i, r) in t.targets.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{r}");
            }
            s.push(')');
        }
        let _ = writeln!(s, " -> {}", t.source);
    }
    s
}
