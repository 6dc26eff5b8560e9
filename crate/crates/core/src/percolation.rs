//! Rule-table head percolation.
//!
//! Rule files are line based:
//!
//! ```text
//! # comment
//! VP left TO VBD VBN MD VBZ VB
//! NP rightdis NN NNS NNP
//! NP left NP
//! DEFAULT left
//! ```
//!
//! Lines for the same parent are tried in file order. `left`/`right` scan
//! the priority labels in the outer loop and the children (left-to-right or
//! right-to-left) in the inner loop; `leftdis`/`rightdis` scan the children
//! in the outer loop and test membership in the priority set. A line with
//! an empty priority list picks the first (`left*`) or last (`right*`)
//! child. When no line matches, the table default picks the first or last
//! child.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::heads::{assign_heads, HeadAssignment, HeadChooser};
use crate::tree::ConstTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
    LeftDis,
    RightDis,
}

impl FromStr for Direction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            "leftdis" => Ok(Direction::LeftDis),
            "rightdis" => Ok(Direction::RightDis),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::LeftDis => "leftdis",
            Direction::RightDis => "rightdis",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub direction: Direction,
    pub priority: Vec<String>,
}

impl Rule {
    fn apply(&self, children: &[&str]) -> Option<usize> {
        let k = children.len();
        let ltr = || 0..k;
        let rtl = || (0..k).rev();
        let found = match self.direction {
            _ if self.priority.is_empty() => match self.direction {
                Direction::Left | Direction::LeftDis => Some(0),
                Direction::Right | Direction::RightDis => Some(k - 1),
            },
            Direction::Left => self
                .priority
                .iter()
                .find_map(|p| ltr().find(|&i| children[i] == p)),
            Direction::Right => self
                .priority
                .iter()
                .find_map(|p| rtl().find(|&i| children[i] == p)),
            Direction::LeftDis => ltr().find(|&i| self.priority.iter().any(|p| p == children[i])),
            Direction::RightDis => rtl().find(|&i| self.priority.iter().any(|p| p == children[i])),
        };
        found.map(|i| i + 1)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DefaultDirection {
    #[default]
    Left,
    Right,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleTable {
    rules: HashMap<String, Vec<Rule>>,
    default: DefaultDirection,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("line {line}: unknown direction '{found}'")]
    BadDirection { line: usize, found: String },
    #[error("line {line}: DEFAULT given more than once")]
    DuplicateDefault { line: usize },
}

impl RuleTable {
    pub fn new(default: DefaultDirection) -> Self {
        RuleTable {
            rules: HashMap::new(),
            default,
        }
    }

    pub fn default_direction(&self) -> DefaultDirection {
        self.default
    }

    pub fn add_rule(&mut self, parent: impl Into<String>, rule: Rule) {
        self.rules.entry(parent.into()).or_default().push(rule);
    }

    pub fn rules_for(&self, parent: &str) -> &[Rule] {
        self.rules.get(parent).map(Vec::as_slice).unwrap_or(&[])
    }

    /// 1-based head child for a configuration of normalized labels.
    pub fn percolate(&self, parent: &str, children: &[&str]) -> usize {
        assert!(!children.is_empty(), "cannot percolate over zero children");
        if children.len() == 1 {
            return 1;
        }
        self.rules_for(parent)
            .iter()
            .find_map(|rule| rule.apply(children))
            .unwrap_or(match self.default {
                DefaultDirection::Left => 1,
                DefaultDirection::Right => children.len(),
            })
    }

    /// Head for every nonterminal of `tree`, each decided from labels alone.
    pub fn percolate_tree(&self, tree: &ConstTree) -> HeadAssignment {
        assign_heads(self, tree)
    }
}

impl HeadChooser for RuleTable {
    fn choose(&self, parent: &str, children: &[&str]) -> usize {
        self.percolate(parent, children)
    }
}

pub fn load_rules(text: &str) -> Result<RuleTable, RuleError> {
    let mut table = RuleTable::default();
    let mut default_seen = false;
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.split('#').next().unwrap_or("");
        let mut fields = line.split_whitespace();
        let Some(parent) = fields.next() else {
            continue;
        };
        let direction = fields.next().unwrap_or("");
        if parent == "DEFAULT" {
            if default_seen {
                return Err(RuleError::DuplicateDefault { line: line_no });
            }
            default_seen = true;
            table.default = match direction {
                "left" => DefaultDirection::Left,
                "right" => DefaultDirection::Right,
                other => {
                    return Err(RuleError::BadDirection {
                        line: line_no,
                        found: other.to_string(),
                    })
                }
            };
            continue;
        }
        let direction = direction.parse().map_err(|_| RuleError::BadDirection {
            line: line_no,
            found: direction.to_string(),
        })?;
        table.add_rule(
            parent,
            Rule {
                direction,
                priority: fields.map(str::to_string).collect(),
            },
        );
    }
    Ok(table)
}

impl FromStr for RuleTable {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, RuleError> {
        load_rules(s)
    }
}
