//! Shared fixtures for the integration suites.

use episodary::{Episode, Sequence};

/// Paper-style shorthand: `a b (c d)` where a parenthesised group shares one
/// time stamp and every other position advances time by one unit.
pub fn compact(text: &str) -> Sequence {
    let mut pairs: Vec<(i64, String)> = Vec::new();
    let mut ts = 0i64;
    let mut group = false;
    for ch in text.chars() {
        match ch {
            '(' => {
                group = true;
                ts += 1;
            }
            ')' => group = false,
            c if c.is_alphanumeric() => {
                if !group {
                    ts += 1;
                }
                pairs.push((ts, c.to_string()));
            }
            _ => panic!("bad compact sequence: {text}"),
        }
    }
    Sequence::from_pairs(pairs).unwrap()
}

/// Four single-event nodes a, b, c, d with one proper edge a -> d.
pub fn toy_g1() -> Episode {
    Episode::new(&[&["a"], &["b"], &["c"], &["d"]], &[(0, 3)], &[]).unwrap()
}

/// a, b, c, d with proper a->c, a->d, c->d, b->d and weak a->b.
pub fn toy_g2() -> Episode {
    Episode::new(
        &[&["a"], &["b"], &["c"], &["d"]],
        &[(0, 2), (0, 3), (2, 3), (1, 3)],
        &[(0, 1)],
    )
    .unwrap()
}

/// a, b and a node holding simultaneous c and d.
pub fn toy_g3() -> Episode {
    Episode::new(&[&["a"], &["b"], &["c", "d"]], &[(0, 2), (1, 2)], &[(0, 1)]).unwrap()
}

/// Two disjoint serial a -> b chains.
pub fn toy_h1() -> Episode {
    Episode::new(&[&["a"], &["a"], &["b"], &["b"]], &[(0, 2), (1, 3)], &[]).unwrap()
}

/// The same two chains plus a weak diagonal; similar to `toy_h1` despite the
/// different graph.
pub fn toy_h2() -> Episode {
    Episode::new(&[&["a"], &["a"], &["b"], &["b"]], &[(0, 2), (1, 3)], &[(0, 3)]).unwrap()
}

/// The instance-closure of `toy_g1` on `abcbdacbcd` with window 5: every
/// pair strictly ordered except b and c.
pub fn closure_g2() -> Episode {
    Episode::new(
        &[&["a"], &["b"], &["c"], &["d"]],
        &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)],
        &[],
    )
    .unwrap()
}
