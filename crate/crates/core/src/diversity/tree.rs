//! Labeled ordered trees in bracketed form, e.g. `(S (NP (DT the) (NN cat)) (VP ran))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("empty tree")]
    Empty,
    #[error("tree must start with `(`, found `{0}`")]
    ExpectedOpen(String),
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("unexpected trailing input `{0}`")]
    Trailing(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(s: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        let boundary = ch == '(' || ch == ')' || ch.is_whitespace();
        if boundary {
            if let Some(st) = start.take() {
                out.push(Token::Atom(&s[st..i]));
            }
            match ch {
                '(' => out.push(Token::Open),
                ')' => out.push(Token::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(Token::Atom(&s[st..]));
    }
    out
}

impl ParseTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        Self {
            label: label.into(),
            children,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(ParseTree::node_count).sum::<usize>()
    }

    /// Number of levels; a single node has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ParseTree::depth).max().unwrap_or(0)
    }

    /// Copy with every node deeper than `depth` removed (root is depth 1).
    ///
    /// # Panics
    ///
    /// If `depth` is zero.
    pub fn truncate(&self, depth: usize) -> ParseTree {
        assert!(depth >= 1, "truncation depth must be at least 1");
        ParseTree {
            label: self.label.clone(),
            children: if depth == 1 {
                Vec::new()
            } else {
                self.children.iter().map(|c| c.truncate(depth - 1)).collect()
            },
        }
    }

    fn parse_node<'a>(tokens: &[Token<'a>], pos: &mut usize) -> Result<ParseTree, TreeError> {
        // Caller guarantees tokens[*pos] == Open.
        *pos += 1;
        let label = match tokens.get(*pos) {
            Some(Token::Atom(a)) => {
                *pos += 1;
                a.to_string()
            }
            Some(_) => String::new(),
            None => return Err(TreeError::Unbalanced),
        };
        let mut children = Vec::new();
        loop {
            match tokens.get(*pos) {
                Some(Token::Close) => {
                    *pos += 1;
                    return Ok(ParseTree { label, children });
                }
                Some(Token::Open) => children.push(Self::parse_node(tokens, pos)?),
                Some(Token::Atom(a)) => {
                    children.push(ParseTree::leaf(*a));
                    *pos += 1;
                }
                None => return Err(TreeError::Unbalanced),
            }
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() && !self.label.is_empty() {
            f.write_str(&self.label)
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for ParseTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens = tokenize(s);
        match tokens.first() {
            None => return Err(TreeError::Empty),
            Some(Token::Open) => {}
            Some(Token::Close) => return Err(TreeError::Unbalanced),
            Some(Token::Atom(a)) => return Err(TreeError::ExpectedOpen(a.to_string())),
        }
        let mut pos = 0;
        let tree = Self::parse_node(&tokens, &mut pos)?;
        match tokens.get(pos) {
            None => Ok(tree),
            Some(Token::Close) => Err(TreeError::Unbalanced),
            Some(_) => Err(TreeError::Trailing(
                tokens[pos..]
                    .iter()
                    .map(|t| match t {
                        Token::Open => "(",
                        Token::Close => ")",
                        Token::Atom(a) => a,
                    })
                    .collect::<Vec<_>>()
                    .join(" "),
            )),
        }
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.label)?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 || !self.label.is_empty() {
                f.write_str(" ")?;
            }
            c.write_child(f)?;
        }
        f.write_str(")")
    }
}

impl TryFrom<String> for ParseTree {
    type Error = TreeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ParseTree> for String {
    fn from(t: ParseTree) -> String {
        t.to_string()
    }
}
