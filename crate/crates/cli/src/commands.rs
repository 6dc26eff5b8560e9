use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use headlayer::align::{align, parse_exclusion_list, AlignOptions, AlignReport, AlignedSentence, ExclusionReason};
use headlayer::bracketed::serialize_corpus;
use headlayer::classifier::{extract_instances, train_with_report, HeadModel, Instance, TrainConfig};
use headlayer::conll::{write_conll, DepGraph};
use headlayer::convert::{convert, convert_with, ConvertOptions, HeadSource};
use headlayer::eval::{bracket_prf, head_accuracy, treebank_diff, uas_counts, BracketOptions, HeadAccuracy};
use headlayer::heads::{format_sidecar_line, HeadAssignment, HeadChooser};
use headlayer::induction::{induce_heads, induction_failures};
use headlayer::percolation::{load_rules, RuleTable};
use headlayer::synthetic::SyntheticGrammar;
use headlayer::transfer::{load_label_map, transfer_eval, transfer_predict, Coverage};
use headlayer::transform::{binarize, debinarize, lift_heads, normalize_punct, DelimiterConfig};
use headlayer::tree::ConstTree;

use crate::args::{Cli, Command, Global, HeadArgs, HeadKind};
use crate::io::{emit, load_deps, load_heads, load_trees, percent, read, Summary};

pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.jobs)
        .build()
        .context("cannot start worker threads")?;
    let g = cli.global;
    pool.install(|| dispatch(cli.command, &g))
}

fn dispatch(command: Command, g: &Global) -> Result<()> {
    match command {
        Command::InduceHeads {
            trees,
            deps,
            out,
            exclude,
            verbose,
        } => induce_cmd(g, &trees, &deps, out.as_deref(), exclude.as_deref(), verbose),
        Command::Percolate { rules, trees, out } => {
            let table = load_rule_file(&rules)?;
            let trees = load_trees(&trees)?;
            let lines: Vec<String> = trees
                .par_iter()
                .map(|t| format_sidecar_line(t, &table.percolate_tree(t)))
                .collect();
            let free = emit(out.as_deref(), &join_lines(&lines))?;
            Summary::default().add("sentences", trees.len()).report(free, g.quiet);
            Ok(())
        }
        Command::Train {
            trees,
            deps,
            out,
            dev_trees,
            dev_deps,
            epochs,
            learning_rate,
            l2,
        } => {
            let config = TrainConfig {
                epochs,
                learning_rate,
                l2,
                seed: g.seed,
            };
            train_cmd(g, &trees, &deps, &out, dev_trees.zip(dev_deps), &config)
        }
        Command::PredictHeads { model, trees, out } => {
            let model = load_model(&model)?;
            let trees = load_trees(&trees)?;
            let lines: Vec<String> = trees
                .par_iter()
                .map(|t| format_sidecar_line(t, &model.predict_tree(t)))
                .collect();
            let free = emit(out.as_deref(), &join_lines(&lines))?;
            Summary::default().add("sentences", trees.len()).report(free, g.quiet);
            Ok(())
        }
        Command::Normalize { trees, out } => {
            let cfg = DelimiterConfig::default();
            let trees = load_trees(&trees)?;
            let normalized: Vec<ConstTree> = trees.par_iter().map(|t| normalize_punct(t, &cfg)).collect();
            let free = emit(out.as_deref(), &serialize_corpus(&normalized))?;
            Summary::default().add("sentences", trees.len()).report(free, g.quiet);
            Ok(())
        }
        Command::Binarize {
            trees,
            heads,
            normalize,
            out,
        } => binarize_cmd(g, &trees, &heads, normalize, out.as_deref()),
        Command::Debinarize { trees, out } => {
            let trees = load_trees(&trees)?;
            let flat = trees
                .par_iter()
                .enumerate()
                .map(|(i, t)| debinarize(t).with_context(|| format!("tree {i}")))
                .collect::<Result<Vec<_>>>()?;
            let free = emit(out.as_deref(), &serialize_corpus(&flat))?;
            Summary::default().add("sentences", flat.len()).report(free, g.quiet);
            Ok(())
        }
        Command::Convert {
            trees,
            heads,
            no_auto_debinarize,
            out,
        } => convert_cmd(g, &trees, &heads, no_auto_debinarize, out.as_deref()),
        Command::EvalHeads { trees, gold, pred } => eval_heads_cmd(&trees, &gold, &pred),
        Command::EvalBrackets {
            gold,
            pred,
            include_intermediate,
            exclude_punct,
        } => {
            let gold = load_trees(&gold)?;
            let pred = load_trees(&pred)?;
            let opts = BracketOptions {
                include_intermediate,
                exclude_punct,
                ..BracketOptions::default()
            };
            let s = bracket_prf(&gold, &pred, &opts)?;
            Summary::default()
                .add("sentences", s.sentences)
                .add("precision", format!("{:.2}", s.precision))
                .add("recall", format!("{:.2}", s.recall))
                .add("f1", format!("{:.2}", s.f1))
                .add("complete_match", format!("{:.2}", s.complete_match))
                .add("matched", s.matched)
                .add("gold_brackets", s.gold_brackets)
                .add("pred_brackets", s.pred_brackets)
                .to_stdout();
            Ok(())
        }
        Command::EvalUas {
            gold,
            pred,
            exclude_punct,
        } => {
            let gold = load_deps(&gold)?;
            let pred = load_deps(&pred)?;
            let cfg = DelimiterConfig::default();
            let c = uas_counts(&gold, &pred, exclude_punct.then_some(&cfg))?;
            Summary::default()
                .add("sentences", gold.len())
                .add("uas", percent(c.accuracy()))
                .add("correct", c.correct)
                .add("total", c.total)
                .to_stdout();
            Ok(())
        }
        Command::DiffBinarized { a, b, examples } => {
            let a = load_trees(&a)?;
            let b = load_trees(&b)?;
            let d = treebank_diff(&a, &b, examples)?;
            let divergent: Vec<String> = d.divergent.iter().map(usize::to_string).collect();
            Summary::default()
                .add("sentences", a.len())
                .add("precision", format!("{:.2}", d.brackets.precision))
                .add("recall", format!("{:.2}", d.brackets.recall))
                .add("f1", format!("{:.2}", d.brackets.f1))
                .add("complete_match", format!("{:.2}", d.identical))
                .add("divergent", divergent.join(","))
                .to_stdout();
            Ok(())
        }
        Command::Transfer {
            model,
            map,
            trees,
            deps,
            out,
        } => transfer_cmd(g, &model, &map, &trees, deps.as_deref(), out.as_deref()),
        Command::Synth {
            sentences,
            trees_out,
            deps_out,
            heads_out,
            exception_rate,
        } => {
            if !(0.0..=1.0).contains(&exception_rate) {
                bail!("exception rate must lie in [0, 1]");
            }
            let grammar = SyntheticGrammar {
                exception_rate,
                ..SyntheticGrammar::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let corpus = grammar.corpus(&mut rng, sentences);
            let trees: Vec<ConstTree> = corpus.iter().map(|(t, _)| t.clone()).collect();
            let deps = corpus
                .iter()
                .map(|(t, h)| convert(t, h))
                .collect::<Result<Vec<_>, _>>()?;
            emit(Some(&trees_out), &serialize_corpus(&trees))?;
            emit(Some(&deps_out), &write_conll(&deps))?;
            if let Some(path) = heads_out {
                let lines: Vec<String> = corpus.iter().map(|(t, h)| format_sidecar_line(t, h)).collect();
                emit(Some(&path), &join_lines(&lines))?;
            }
            Summary::default().add("sentences", sentences).to_stdout();
            Ok(())
        }
    }
}

fn join_lines(lines: &[String]) -> String {
    let mut s = String::new();
    for l in lines {
        s.push_str(l);
        s.push('\n');
    }
    s
}

fn load_rule_file(path: &Path) -> Result<RuleTable> {
    load_rules(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_model(path: &Path) -> Result<HeadModel> {
    HeadModel::from_text(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn describe_exclusion(reason: &ExclusionReason) -> String {
    match reason {
        ExclusionReason::TokenCount { tree, dep } => format!("token count {tree} vs {dep}"),
        ExclusionReason::FormMismatch {
            token,
            tree_form,
            dep_form,
        } => format!("token {token} form '{tree_form}' vs '{dep_form}'"),
        ExclusionReason::Listed => "listed for exclusion".to_string(),
    }
}

fn aligned_corpus(
    g: &Global,
    trees: &Path,
    deps: &Path,
    exclude: BTreeSet<usize>,
) -> Result<(Vec<AlignedSentence>, AlignReport, usize)> {
    let t = load_trees(trees)?;
    let d = load_deps(deps)?;
    let total = t.len();
    let opts = AlignOptions {
        strict: g.strict_align,
        exclude,
    };
    let (aligned, report) = align(t, d, &opts)?;
    if !g.quiet {
        for w in &report.warnings {
            eprintln!(
                "warning: sentence {} token {}: tree form '{}' vs dependency form '{}'",
                w.sentence, w.token, w.tree_form, w.dep_form
            );
        }
        for (i, reason) in &report.excluded {
            eprintln!("warning: sentence {i} excluded: {}", describe_exclusion(reason));
        }
    }
    Ok((aligned, report, total))
}

fn induce_cmd(
    g: &Global,
    trees: &Path,
    deps: &Path,
    out: Option<&Path>,
    exclude: Option<&Path>,
    verbose: bool,
) -> Result<()> {
    let exclude = match exclude {
        Some(p) => parse_exclusion_list(&read(p)?).with_context(|| format!("{}", p.display()))?,
        None => BTreeSet::new(),
    };
    let (aligned, report, total) = aligned_corpus(g, trees, deps, exclude)?;
    let mut lines = vec![String::new(); total];
    for (i, reason) in &report.excluded {
        lines[*i] = format!("# excluded: {}", describe_exclusion(reason));
    }
    let results: Vec<_> = aligned.par_iter().map(induce_heads).collect();
    let mut induced = 0;
    let mut failed = 0;
    for ((index, sentence), result) in report.kept.iter().zip(&aligned).zip(results) {
        lines[*index] = match result {
            Ok(h) => {
                induced += 1;
                format_sidecar_line(&sentence.tree, &h)
            }
            Err(f) => {
                failed += 1;
                if verbose && !g.quiet {
                    for f in induction_failures(sentence) {
                        eprintln!(
                            "sentence {index}: node {} ({}) has {} span-head candidates",
                            f.node,
                            sentence.tree.label(f.node),
                            f.candidate_count
                        );
                    }
                }
                format!("# no unique span head at node {} ({} candidates)", f.node, f.candidate_count)
            }
        };
    }
    let free = emit(out, &join_lines(&lines))?;
    Summary::default()
        .add("sentences", total)
        .add("induced", induced)
        .add("excluded_alignment", report.excluded.len())
        .add("excluded_induction", failed)
        .report(free, g.quiet);
    Ok(())
}

fn supervised_instances(g: &Global, trees: &Path, deps: &Path) -> Result<(Vec<Instance>, usize)> {
    let (aligned, _, _) = aligned_corpus(g, trees, deps, BTreeSet::new())?;
    let per_sentence: Vec<Option<Vec<Instance>>> = aligned
        .par_iter()
        .map(|s| induce_heads(s).ok().map(|h| extract_instances(&s.tree, &h)))
        .collect();
    let used = per_sentence.iter().flatten().count();
    Ok((per_sentence.into_iter().flatten().flatten().collect(), used))
}

fn train_cmd(
    g: &Global,
    trees: &Path,
    deps: &Path,
    out: &Path,
    dev: Option<(PathBuf, PathBuf)>,
    config: &TrainConfig,
) -> Result<()> {
    let (train, used) = supervised_instances(g, trees, deps)?;
    let dev = match dev {
        Some((t, d)) => Some(supervised_instances(g, &t, &d)?.0),
        None => None,
    };
    let (model, report) = train_with_report(&train, dev.as_deref(), config)?;
    emit(Some(out), &model.to_text())?;
    let mut s = Summary::default();
    s.add("sentences", used)
        .add("instances", train.len())
        .add("features", model.weights.len())
        .add("epochs", config.epochs);
    if let Some(loss) = report.train_loss.last() {
        s.add("train_loss", format!("{loss:.6}"));
    }
    if let Some(best) = report.best_epoch {
        s.add("best_epoch", best)
            .add("dev_loss", format!("{:.6}", report.dev_loss[best - 1]));
    }
    s.to_stdout();
    Ok(())
}

/// Owned head source for the `--heads` option.
enum Heads {
    Rules(RuleTable),
    Model(HeadModel),
    Oracle(Vec<DepGraph>),
    File(Vec<Option<HeadAssignment>>),
}

impl Heads {
    fn load(args: &HeadArgs, trees: &[ConstTree]) -> Result<Heads> {
        let need = |p: &Option<PathBuf>, flag: &str| -> Result<PathBuf> {
            let kind = format!("{:?}", args.heads).to_lowercase();
            p.clone().ok_or_else(|| anyhow!("--heads {kind} requires --{flag}"))
        };
        Ok(match args.heads {
            HeadKind::Rules => Heads::Rules(load_rule_file(&need(&args.rules, "rules")?)?),
            HeadKind::Model => Heads::Model(load_model(&need(&args.model, "model")?)?),
            HeadKind::Oracle => {
                let deps = load_deps(&need(&args.deps, "deps")?)?;
                if deps.len() != trees.len() {
                    bail!("{} trees but {} dependency graphs", trees.len(), deps.len());
                }
                Heads::Oracle(deps)
            }
            HeadKind::File => Heads::File(load_heads(&need(&args.head_file, "head-file")?, trees)?),
        })
    }

    fn source(&self) -> HeadSource<'_> {
        match self {
            Heads::Rules(t) => HeadSource::Rules(t),
            Heads::Model(m) => HeadSource::Model(m),
            Heads::Oracle(d) => HeadSource::Oracle(d),
            Heads::File(h) => HeadSource::Sidecar(h),
        }
    }

    fn chooser(&self) -> Option<&dyn HeadChooser> {
        match self {
            Heads::Rules(t) => Some(t),
            Heads::Model(m) => Some(m),
            _ => None,
        }
    }
}

fn binarize_cmd(g: &Global, trees: &Path, args: &HeadArgs, normalize: bool, out: Option<&Path>) -> Result<()> {
    let trees = load_trees(trees)?;
    let heads = Heads::load(args, &trees)?;
    let cfg = DelimiterConfig::default();
    let binarized = trees
        .par_iter()
        .enumerate()
        .map(|(i, tree)| -> Result<ConstTree> {
            let (base_tree, base) = heads.source().heads_for(i, tree)?;
            let (t, h) = if normalize {
                let n = normalize_punct(&base_tree, &cfg);
                let lifted = lift_heads(&n, &base, &cfg, heads.chooser())?;
                (n, lifted)
            } else {
                (base_tree, base)
            };
            Ok(binarize(&t, &h)?)
        })
        .enumerate()
        .map(|(i, r)| r.with_context(|| format!("tree {i}")))
        .collect::<Result<Vec<_>>>()?;
    let free = emit(out, &serialize_corpus(&binarized))?;
    Summary::default().add("sentences", binarized.len()).report(free, g.quiet);
    Ok(())
}

fn convert_cmd(g: &Global, trees: &Path, args: &HeadArgs, no_auto: bool, out: Option<&Path>) -> Result<()> {
    let trees = load_trees(trees)?;
    let heads = Heads::load(args, &trees)?;
    let opts = ConvertOptions {
        auto_debinarize: !no_auto,
    };
    let deps = trees
        .par_iter()
        .enumerate()
        .map(|(i, tree)| -> Result<DepGraph> {
            let (t, h) = heads.source().heads_for(i, tree)?;
            convert_with(&t, &h, opts).with_context(|| format!("tree {i}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let free = emit(out, &write_conll(&deps))?;
    Summary::default().add("sentences", deps.len()).report(free, g.quiet);
    Ok(())
}

fn print_accuracy(acc: &HeadAccuracy, s: &mut Summary) {
    s.add("accuracy", percent(acc.accuracy()))
        .add("correct", acc.overall.correct)
        .add("total", acc.overall.total);
    for (label, c) in &acc.by_category {
        s.add(&format!("category.{label}.accuracy"), percent(c.accuracy()))
            .add(&format!("category.{label}.total"), c.total);
    }
}

fn eval_heads_cmd(trees: &Path, gold: &Path, pred: &Path) -> Result<()> {
    let trees = load_trees(trees)?;
    let gold = load_heads(gold, &trees)?;
    let pred = load_heads(pred, &trees)?;
    let mut g_list = Vec::new();
    let mut p_list = Vec::new();
    let mut t_list = Vec::new();
    let mut skipped = 0;
    for ((g, p), t) in gold.into_iter().zip(pred).zip(&trees) {
        match (g, p) {
            (Some(g), Some(p)) => {
                g_list.push(g);
                p_list.push(p);
                t_list.push(t.clone());
            }
            _ => skipped += 1,
        }
    }
    let acc = head_accuracy(&g_list, &p_list, &t_list)?;
    let mut s = Summary::default();
    s.add("sentences", t_list.len()).add("skipped", skipped);
    print_accuracy(&acc, &mut s);
    s.to_stdout();
    Ok(())
}

fn report_coverage(cov: &Coverage, quiet: bool) {
    if !quiet && !cov.unmapped.is_empty() {
        let labels: Vec<&str> = cov.unmapped.iter().map(String::as_str).collect();
        eprintln!("warning: unmapped labels: {}", labels.join(" "));
    }
}

fn transfer_cmd(
    g: &Global,
    model: &Path,
    map: &Path,
    trees: &Path,
    deps: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let model = load_model(model)?;
    let map = load_label_map(&read(map)?).with_context(|| format!("{}", map.display()))?;
    if let Some(deps) = deps {
        let (aligned, _, _) = aligned_corpus(g, trees, deps, BTreeSet::new())?;
        let report = transfer_eval(&model, &map, &aligned)?;
        report_coverage(&report.coverage, g.quiet);
        let mut s = Summary::default();
        s.add("sentences", aligned.len() - report.excluded.len())
            .add("excluded_induction", report.excluded.len())
            .add("labels_mapped", report.coverage.mapped)
            .add("labels_identity", report.coverage.identity)
            .add("labels_unk", report.coverage.unk);
        print_accuracy(&report.accuracy, &mut s);
        s.to_stdout();
        return Ok(());
    }
    let trees = load_trees(trees)?;
    let results = trees
        .par_iter()
        .map(|t| transfer_predict(&model, &map, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut coverage = Coverage::default();
    let lines: Vec<String> = trees
        .iter()
        .zip(&results)
        .map(|(t, (h, cov))| {
            coverage.merge(cov);
            format_sidecar_line(t, h)
        })
        .collect();
    report_coverage(&coverage, g.quiet);
    let free = emit(out, &join_lines(&lines))?;
    Summary::default()
        .add("sentences", trees.len())
        .add("labels_mapped", coverage.mapped)
        .add("labels_identity", coverage.identity)
        .add("labels_unk", coverage.unk)
        .report(free, g.quiet);
    Ok(())
}
