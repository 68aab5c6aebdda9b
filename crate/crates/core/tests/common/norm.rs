//! Layout- and suffix-insensitive comparison of program text.

use std::collections::HashMap;

fn tokens(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = src.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' | ')' | '[' | ']' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Generated name families whose numeric suffix is arbitrary.
const FRESH: &[&str] = &["k", "newGroup"];

/// Single-spaced tokens; generated names are renumbered per family by first
/// appearance, so `k3051` and `k1` compare equal.
pub fn normalize(src: &str) -> String {
    let mut seen: HashMap<String, HashMap<String, usize>> = HashMap::new();
    tokens(src)
        .into_iter()
        .map(|t| {
            let prefix = t.trim_end_matches(|c: char| c.is_ascii_digit());
            if !FRESH.contains(&prefix) || prefix.len() == t.len() {
                return t;
            }
            let per = seen.entry(prefix.to_string()).or_default();
            let n = per.len() + 1;
            let k = *per.entry(t.clone()).or_insert(n);
            format!("{prefix}{k}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}
