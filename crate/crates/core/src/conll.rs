//! CoNLL-X style dependency treebanks.

use std::fmt;

use thiserror::Error;

/// Why a head array is not a single-rooted tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeViolation {
    Cycle,
    Multiroot,
    DanglingHead,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeViolation::Cycle => "cycle",
            TreeViolation::Multiroot => "multiroot",
            TreeViolation::DanglingHead => "dangling-head",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ConllError {
    #[error("line {line}: expected at least 8 tab-separated columns, found {found}")]
    BadColumnCount { line: usize, found: usize },
    #[error("line {line}: invalid {column} field '{value}'")]
    BadField {
        line: usize,
        column: &'static str,
        value: String,
    },
    #[error("sentence {sentence}: dependency structure is not a tree ({reason})")]
    NonTreeStructure {
        sentence: usize,
        reason: TreeViolation,
    },
}

/// Dependency analysis of one sentence. Token `i` (1-based) is governed by
/// `head(i)`, where 0 is the artificial root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepGraph {
    forms: Vec<String>,
    pos: Vec<String>,
    heads: Vec<usize>,
    rels: Vec<String>,
}

/// Checks that `heads` (index `i` holds the governor of token `i + 1`)
/// describes a tree rooted in 0 with exactly one root attachment.
///
/// Violations are reported in the order dangling head, multiple roots,
/// cycle, so each malformed array gets exactly one reason.
pub fn check_tree(heads: &[usize]) -> Result<(), TreeViolation> {
    let n = heads.len();
    if heads.iter().any(|&h| h > n) {
        return Err(TreeViolation::DanglingHead);
    }
    if heads.iter().filter(|&&h| h == 0).count() > 1 {
        return Err(TreeViolation::Multiroot);
    }
    // 0 = unvisited, 1 = on current path, 2 = reaches root
    let mut state = vec![0u8; n + 1];
    state[0] = 2;
    for start in 1..=n {
        let mut path = Vec::new();
        let mut cur = start;
        while state[cur] == 0 {
            state[cur] = 1;
            path.push(cur);
            cur = heads[cur - 1];
        }
        if state[cur] == 1 {
            return Err(TreeViolation::Cycle);
        }
        for p in path {
            state[p] = 2;
        }
    }
    Ok(())
}

impl DepGraph {
    /// Builds a graph, validating the tree invariant. All vectors must have
    /// the same length.
    pub fn new(
        forms: Vec<String>,
        pos: Vec<String>,
        heads: Vec<usize>,
        rels: Vec<String>,
    ) -> Result<Self, TreeViolation> {
        assert!(
            forms.len() == heads.len() && pos.len() == heads.len() && rels.len() == heads.len(),
            "column vectors must have equal length"
        );
        check_tree(&heads)?;
        Ok(DepGraph {
            forms,
            pos,
            heads,
            rels,
        })
    }

    /// Graph with placeholder forms, tags and relations.
    pub fn from_heads(heads: Vec<usize>) -> Result<Self, TreeViolation> {
        let n = heads.len();
        let rels = heads
            .iter()
            .map(|&h| if h == 0 { "root" } else { "_" }.to_string())
            .collect();
        DepGraph::new(vec!["_".into(); n], vec!["_".into(); n], heads, rels)
    }

    /// Number of tokens.
    pub fn n(&self) -> usize {
        self.heads.len()
    }

    /// Governor of 1-based token `i`.
    pub fn head(&self, i: usize) -> usize {
        self.heads[i - 1]
    }

    /// Governors of tokens 1..n.
    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn rel(&self, i: usize) -> &str {
        &self.rels[i - 1]
    }

    pub fn form(&self, i: usize) -> &str {
        &self.forms[i - 1]
    }

    pub fn pos(&self, i: usize) -> &str {
        &self.pos[i - 1]
    }

    pub fn forms(&self) -> &[String] {
        &self.forms
    }

    pub fn tags(&self) -> &[String] {
        &self.pos
    }

    /// The token attached to the artificial root.
    pub fn root_token(&self) -> usize {
        self.heads.iter().position(|&h| h == 0).unwrap() + 1
    }
}

fn parse_index(field: &str, line: usize, column: &'static str) -> Result<usize, ConllError> {
    field.parse().map_err(|_| ConllError::BadField {
        line,
        column,
        value: field.to_string(),
    })
}

/// Parses blank-line separated sentences of tab-separated columns
/// (ID FORM LEMMA CPOS POS FEATS HEAD DEPREL ...). Comment lines starting
/// with `#` and multiword or empty-node rows are skipped.
pub fn parse_conll(text: &str) -> Result<Vec<DepGraph>, ConllError> {
    let mut graphs = Vec::new();
    let mut rows: Vec<(usize, Vec<&str>)> = Vec::new();

    let mut flush = |rows: &mut Vec<(usize, Vec<&str>)>| -> Result<(), ConllError> {
        if rows.is_empty() {
            return Ok(());
        }
        let sentence = graphs.len() + 1;
        let mut forms = Vec::new();
        let mut pos = Vec::new();
        let mut heads = Vec::new();
        let mut rels = Vec::new();
        for (i, (line, fields)) in rows.iter().enumerate() {
            let id = parse_index(fields[0], *line, "ID")?;
            if id != i + 1 {
                return Err(ConllError::BadField {
                    line: *line,
                    column: "ID",
                    value: fields[0].to_string(),
                });
            }
            forms.push(fields[1].to_string());
            let tag = if fields[4] == "_" { fields[3] } else { fields[4] };
            pos.push(tag.to_string());
            heads.push(parse_index(fields[6], *line, "HEAD")?);
            rels.push(fields[7].to_string());
        }
        rows.clear();
        let graph = DepGraph::new(forms, pos, heads, rels)
            .map_err(|reason| ConllError::NonTreeStructure { sentence, reason })?;
        graphs.push(graph);
        Ok(())
    };

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut rows)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 8 {
            return Err(ConllError::BadColumnCount {
                line: lineno,
                found: fields.len(),
            });
        }
        if fields[0].contains(['-', '.']) {
            continue;
        }
        rows.push((lineno, fields));
    }
    flush(&mut rows)?;
    Ok(graphs)
}

/// Writes 10-column CoNLL-X rows, `_` for unused fields, with a blank line
/// after every sentence.
pub fn write_conll(graphs: &[DepGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        for i in 1..=g.n() {
            out.push_str(&format!(
                "{}\t{}\t_\t_\t{}\t_\t{}\t{}\t_\t_\n",
                i,
                g.form(i),
                g.pos(i),
                g.head(i),
                g.rel(i)
            ));
        }
        out.push('\n');
    }
    out
}
