use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use headlayer::bracketed::parse_bracketed;
use headlayer::conll::{parse_conll, DepGraph};
use headlayer::heads::{parse_sidecar_line, sidecar_lines, HeadAssignment};
use headlayer::tree::ConstTree;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Trees with empty elements removed.
pub fn load_trees(path: &Path) -> Result<Vec<ConstTree>> {
    let text = read(path)?;
    let trees = parse_bracketed(&text).with_context(|| format!("{}", path.display()))?;
    trees
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.strip_empties()
                .with_context(|| format!("{}: tree {i}", path.display()))
        })
        .collect()
}

pub fn load_deps(path: &Path) -> Result<Vec<DepGraph>> {
    let text = read(path)?;
    parse_conll(&text).with_context(|| format!("{}", path.display()))
}

/// One entry per tree; `None` for `#` lines.
pub fn load_heads(path: &Path, trees: &[ConstTree]) -> Result<Vec<Option<HeadAssignment>>> {
    let text = read(path)?;
    let lines = sidecar_lines(&text);
    if lines.len() != trees.len() {
        bail!(
            "{}: {} head lines but {} trees",
            path.display(),
            lines.len(),
            trees.len()
        );
    }
    lines
        .iter()
        .zip(trees)
        .enumerate()
        .map(|(i, (line, tree))| {
            parse_sidecar_line(line, tree).with_context(|| format!("{}: line {}", path.display(), i + 1))
        })
        .collect()
}

/// Writes `text` to `out`, or to standard output when no path is given.
/// Returns whether standard output is still free for a summary.
pub fn emit(out: Option<&Path>, text: &str) -> Result<bool> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(true)
        }
        None => {
            print!("{text}");
            Ok(false)
        }
    }
}

/// Collects `key=value` lines for a command summary.
#[derive(Default)]
pub struct Summary {
    lines: Vec<String>,
}

impl Summary {
    pub fn add(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    pub fn to_stdout(&self) {
        for l in &self.lines {
            println!("{l}");
        }
    }

    /// Prints to standard output if it is free, else to standard error
    /// unless quiet.
    pub fn report(&self, stdout_free: bool, quiet: bool) {
        if stdout_free {
            self.to_stdout();
        } else if !quiet {
            for l in &self.lines {
                eprintln!("{l}");
            }
        }
    }
}

pub fn percent(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.2}", 100.0 * x)
    }
}
