//! The demonstration model shipped with the repository.
//!
//! Construction (k = 5 source values on the diagonal, m = 2 instrument
//! values each): source values 0–3 are "tuned" for one setting pair apiece —
//! both instruments detect (outcome ≠ 0) only for instrument value 0, and
//! the detected product equals the canonical sign pattern (+,−,+,+) of that
//! pair. Source value 4 is background: always detected, with fixed outcomes
//! (+1, +1, +1, −1) whose per-pair products are (+,−,+,−).
//!
//! Full-ensemble expectations are tame (canonical S = 3/5), but conditioning
//! on "both detected" concentrates each pair on its tuned value plus
//! background, giving conditional expectations (1, −1, 1, −3/5) and a
//! post-selected canonical S = 12/5 = 2.4 > 2. The conditional marginal of
//! A_x flips between +1, −1/3, 3/5 and 1/3 depending on the distant setting
//! and outcome — apparent signalling — while the raw marginals are exactly
//! setting-independent.

use crate::rat::{ratio, zero, Rational};

use super::ContextualModel;

/// Builds the shipped post-selection demonstration model.
pub fn post_selection_demo() -> ContextualModel {
    let k = 5;
    let m = 2;
    let mut source = vec![zero(); k * k];
    for i in 0..k {
        source[i * k + i] = ratio(1, 5);
    }
    let instruments: [Vec<Rational>; 4] =
        std::array::from_fn(|_| vec![ratio(1, 2), ratio(1, 2)]);

    // Rows are source values 0..5, columns instrument values 0..2.
    // Tuned rows detect only at instrument value 0; row 4 always detects.
    let a_x = vec![
        1, 0, // tuned for (x, y)
        -1, 0, // tuned for (x, y′)
        0, 0, //
        0, 0, //
        1, 1, // background
    ];
    let a_xp = vec![
        0, 0, //
        0, 0, //
        1, 0, // tuned for (x′, y)
        1, 0, // tuned for (x′, y′)
        1, 1, // background
    ];
    let b_y = vec![
        1, 0, // with A_x(0,·) = +1: product +1
        0, 0, //
        1, 0, // with A_x′(2,·) = +1: product +1
        0, 0, //
        1, 1, // background
    ];
    let b_yp = vec![
        0, 0, //
        1, 0, // with A_x(1,·) = −1: product −1
        0, 0, //
        1, 0, // with A_x′(3,·) = +1: product +1
        -1, -1, // background
    ];
    ContextualModel::new(k, m, source, instruments, [a_x, a_xp, b_y, b_yp])
        .expect("demo model is valid")
}
