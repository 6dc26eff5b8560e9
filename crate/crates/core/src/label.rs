//! Category label and word-form normalization.

/// Tag of empty elements (traces, null complementizers).
pub const EMPTY_ELEMENT: &str = "-NONE-";

/// Prefix marking intermediate nodes introduced by normalization and
/// binarization.
pub const INTERMEDIATE_PREFIX: char = '@';

/// Strips function tags and co-index suffixes: everything from the first
/// `-` or `=` onward is removed. Labels starting with `-` (`-LRB-`,
/// `-NONE-`, ...) are returned unchanged.
///
/// ```
/// use headlayer::label::normalize_label;
/// assert_eq!(normalize_label("NP-SBJ-1"), "NP");
/// assert_eq!(normalize_label("-LRB-"), "-LRB-");
/// ```
pub fn normalize_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    match label.find(['-', '=']) {
        Some(0) | None => label,
        Some(i) => &label[..i],
    }
}

pub fn is_intermediate(label: &str) -> bool {
    label.starts_with(INTERMEDIATE_PREFIX)
}

/// Label of the original category an intermediate node was derived from.
pub fn base_label(label: &str) -> &str {
    label.trim_start_matches(INTERMEDIATE_PREFIX)
}

/// Label for a new intermediate node created under a node labeled `label`.
pub fn intermediate_label(label: &str) -> String {
    format!("{}{}", INTERMEDIATE_PREFIX, base_label(label))
}

const FORM_ESCAPES: &[(&str, &str)] = &[
    ("-LRB-", "("),
    ("-RRB-", ")"),
    ("-LCB-", "{"),
    ("-RCB-", "}"),
    ("-LSB-", "["),
    ("-RSB-", "]"),
    ("``", "\""),
    ("''", "\""),
];

/// Maps treebank escapes to the characters they stand for, so that forms
/// from differently escaped resources compare equal.
pub fn normalize_form(form: &str) -> &str {
    FORM_ESCAPES
        .iter()
        .find(|(escaped, _)| *escaped == form)
        .map(|(_, plain)| *plain)
        .unwrap_or(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_function_tags() {
        assert_eq!(normalize_label("NP-SBJ-1"), "NP");
        assert_eq!(normalize_label("NP=2"), "NP");
        assert_eq!(normalize_label("PP-LOC=3"), "PP");
        assert_eq!(normalize_label("VP"), "VP");
        assert_eq!(normalize_label("@NP-SBJ"), "@NP");
    }

    #[test]
    fn keeps_dash_initial_labels() {
        assert_eq!(normalize_label("-LRB-"), "-LRB-");
        assert_eq!(normalize_label("-RRB-"), "-RRB-");
        assert_eq!(normalize_label("-NONE-"), "-NONE-");
    }

    #[test]
    fn form_escapes() {
        assert_eq!(normalize_form("-LRB-"), "(");
        assert_eq!(normalize_form("("), "(");
        assert_eq!(normalize_form("``"), normalize_form("''"));
        assert_eq!(normalize_form("dog"), "dog");
    }

    #[test]
    fn intermediate_labels() {
        assert_eq!(intermediate_label("NP"), "@NP");
        assert_eq!(intermediate_label("@NP"), "@NP");
        assert!(is_intermediate("@S"));
        assert!(!is_intermediate("S"));
    }

    proptest! {
        #[test]
        fn normalize_label_is_idempotent(label in "[-=A-Z@0-9$]{1,10}") {
            let once = normalize_label(&label);
            prop_assert_eq!(normalize_label(once), once);
        }
    }
}
