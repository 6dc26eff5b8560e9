use super::Instance;

/// Bumped whenever the templates below change; stored in model files.
pub const FEATURE_TEMPLATE_VERSION: u32 = 1;

const LEFT_BOUNDARY: &str = "<s>";
const RIGHT_BOUNDARY: &str = "</s>";

fn arity_bucket(k: usize) -> &'static str {
    match k {
        1 => "1",
        2 => "2",
        3 => "3",
        4 => "4",
        _ => "5+",
    }
}

/// Features of choosing child `candidate` (1-based) as head of `instance`.
pub fn featurize(instance: &Instance, candidate: usize) -> Vec<String> {
    let k = instance.arity();
    assert!(
        (1..=k).contains(&candidate),
        "candidate {candidate} out of range 1..={k}"
    );
    let p = &instance.parent;
    let c = &instance.children[candidate - 1];
    let l = if candidate > 1 {
        instance.children[candidate - 2].as_str()
    } else {
        LEFT_BOUNDARY
    };
    let r = if candidate < k {
        instance.children[candidate].as_str()
    } else {
        RIGHT_BOUNDARY
    };
    let rpos = k + 1 - candidate;

    let mut f = vec![
        format!("P={p}"),
        format!("C={c}"),
        format!("P={p}&C={c}"),
        format!("pos={candidate}"),
        format!("rpos={rpos}"),
        format!("P={p}&pos={candidate}"),
        format!("P={p}&rpos={rpos}"),
        format!("L={l}"),
        format!("R={r}"),
        format!("P={p}&L={l}&C={c}"),
        format!("P={p}&C={c}&R={r}"),
        format!("n={}&P={p}", arity_bucket(k)),
    ];
    if candidate == 1 {
        f.push(format!("is-leftmost&P={p}"));
    }
    if candidate == k {
        f.push(format!("is-rightmost&P={p}"));
    }
    f
}
