//! Reader and writer for Penn-style bracketed trees.

use thiserror::Error;

use crate::tree::{ConstTree, NodeId, NodeKind, Subtree, TreeError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BracketError {
    #[error("unbalanced parentheses (line {line})")]
    UnbalancedParens { line: usize },
    #[error("empty constituent at line {line}, column {column}")]
    EmptyConstituent { line: usize, column: usize },
    #[error("unexpected token '{token}' at line {line}, column {column}")]
    BadToken {
        token: String,
        line: usize,
        column: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut chars = line.char_indices().peekable();
        while let Some((col, c)) = chars.next() {
            let tok = match c {
                '(' => Tok::Open,
                ')' => Tok::Close,
                c if c.is_whitespace() => continue,
                _ => {
                    let mut end = col + c.len_utf8();
                    while let Some(&(i, c)) = chars.peek() {
                        if c == '(' || c == ')' || c.is_whitespace() {
                            break;
                        }
                        end = i + c.len_utf8();
                        chars.next();
                    }
                    Tok::Atom(line[col..end].to_string())
                }
            };
            tokens.push(Token {
                tok,
                line: lineno + 1,
                column: col + 1,
            });
        }
    }
    tokens
}

const BRACKET_TAGS: [&str; 7] = ["-LRB-", "-RRB-", "-LSB-", "-RSB-", "-LCB-", "-RCB-", "PU"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    /// Some treebanks write bracket tokens unescaped, as in `(-LRB- ()`.
    /// Under a bracket tag, a lone parenthesis followed by the closing one
    /// is read as the word.
    fn bare_paren_word(&mut self, label: &str) -> Option<String> {
        if !BRACKET_TAGS.contains(&label) {
            return None;
        }
        let word = match (self.tokens.get(self.pos)?.tok.clone(), &self.tokens.get(self.pos + 1)?.tok) {
            (Tok::Open, Tok::Close) => "(",
            (Tok::Close, Tok::Close) => ")",
            _ => return None,
        };
        self.pos += 2;
        Some(word.to_string())
    }

    /// Parses a constituent whose opening parenthesis has been consumed.
    fn constituent(&mut self, open: &Token) -> Result<Subtree, BracketError> {
        let unbalanced = BracketError::UnbalancedParens { line: open.line };
        let empty = BracketError::EmptyConstituent {
            line: open.line,
            column: open.column,
        };
        let label = match self.peek().map(|t| &t.tok) {
            None => return Err(unbalanced),
            Some(Tok::Close) => return Err(empty),
            Some(Tok::Open) => String::new(),
            Some(Tok::Atom(a)) => {
                let a = a.clone();
                self.pos += 1;
                a
            }
        };

        if let Some(word) = self.bare_paren_word(&label) {
            return Ok(Subtree::leaf(label, word));
        }

        let first = self.next().ok_or_else(|| unbalanced.clone())?;
        match first.tok {
            Tok::Close => Err(empty),
            Tok::Atom(word) => match self.next() {
                None => Err(unbalanced),
                Some(Token { tok: Tok::Close, .. }) => Ok(Subtree::leaf(label, word)),
                Some(t) => Err(bad_token(t)),
            },
            Tok::Open => {
                let mut children = vec![self.constituent(&first)?];
                loop {
                    let t = self.next().ok_or_else(|| unbalanced.clone())?;
                    match t.tok {
                        Tok::Close => break,
                        Tok::Open => children.push(self.constituent(&t)?),
                        Tok::Atom(_) => return Err(bad_token(t)),
                    }
                }
                Ok(Subtree::phrase(label, children))
            }
        }
    }
}

fn bad_token(t: Token) -> BracketError {
    let token = match t.tok {
        Tok::Open => "(".to_string(),
        Tok::Close => ")".to_string(),
        Tok::Atom(a) => a,
    };
    BracketError::BadToken {
        token,
        line: t.line,
        column: t.column,
    }
}

/// Parses zero or more whitespace-separated bracketed trees.
///
/// A top-level wrapper with an empty label and a single child, as in
/// `( (S ...) )`, is removed.
pub fn parse_bracketed(text: &str) -> Result<Vec<ConstTree>, BracketError> {
    let mut parser = Parser {
        tokens: tokenize(text),
        pos: 0,
    };
    let mut trees = Vec::new();
    while let Some(t) = parser.next() {
        match t.tok {
            Tok::Open => {
                let mut subtree = parser.constituent(&t)?;
                if let Subtree::Phrase { label, children } = &mut subtree {
                    if label.is_empty() && children.len() == 1 {
                        subtree = children.pop().unwrap();
                    }
                }
                let tree = ConstTree::from_subtree(subtree).map_err(|e| match e {
                    TreeError::ChildlessNonterminal { .. } | TreeError::EmptyTree => {
                        BracketError::EmptyConstituent {
                            line: t.line,
                            column: t.column,
                        }
                    }
                })?;
                trees.push(tree);
            }
            Tok::Close => return Err(BracketError::UnbalancedParens { line: t.line }),
            Tok::Atom(_) => return Err(bad_token(t)),
        }
    }
    Ok(trees)
}

/// Single-line bracketed rendering of a tree.
pub fn serialize_bracketed(tree: &ConstTree) -> String {
    let mut out = String::new();
    write_node(tree, tree.root(), &mut out);
    out
}

fn write_node(tree: &ConstTree, id: NodeId, out: &mut String) {
    let node = tree.node(id);
    out.push('(');
    out.push_str(&node.label);
    match &node.kind {
        NodeKind::Preterminal { word, .. } => {
            out.push(' ');
            out.push_str(word);
        }
        NodeKind::Nonterminal { children } => {
            for &child in children {
                out.push(' ');
                write_node(tree, child, out);
            }
        }
    }
    out.push(')');
}

/// One tree per line, newline-terminated.
pub fn serialize_corpus(trees: &[ConstTree]) -> String {
    let mut out = String::new();
    for tree in trees {
        out.push_str(&serialize_bracketed(tree));
        out.push('\n');
    }
    out
}
