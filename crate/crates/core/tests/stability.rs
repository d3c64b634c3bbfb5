//! Two independent seeds at 100k samples must agree on every frequency to
//! within 1.5 percentage points.

use std::path::Path;

use smaa_promethee::elicitation::load_statements;
use smaa_promethee::pipeline::{analyse, Systems};
use smaa_promethee::{LpConfig, Mode, Results, SamplerConfig, Table};

const MAX_GAP_PP: f64 = 1.5;

fn run(mode: Mode, thinning: usize, seed: u64) -> Results {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let t = Table::load(&dir.join("students.json")).unwrap();
    let st = load_statements(&dir.join("scenario1.jsonl"), &t).unwrap();
    let systems = Systems::compile(&st, &t).unwrap();
    let cfg = SamplerConfig {
        seed,
        thinning,
        ..SamplerConfig::default()
    };
    analyse(&t, &systems, mode, &cfg, &LpConfig::default())
        .unwrap()
        .0
}

fn largest_gap_pp(a: &Results, b: &Results) -> f64 {
    let tables = |r: &Results| {
        [
            &r.rank_counts,
            &r.p1_pref,
            &r.p1_indiff,
            &r.p1_incomp,
            &r.p2_pref,
            &r.p2_indiff,
        ]
        .map(|m| r.fractions(m))
    };
    let (ta, tb) = (tables(a), tables(b));
    ta.iter()
        .zip(&tb)
        .flat_map(|(x, y)| x.iter().flatten().zip(y.iter().flatten()))
        .map(|(p, q)| 100.0 * (p - q).abs())
        .fold(0.0, f64::max)
}

#[test]
fn classical_seeds_agree_at_default_settings() {
    let gap = largest_gap_pp(&run(Mode::Classical, 1, 101), &run(Mode::Classical, 1, 202));
    assert!(gap <= MAX_GAP_PP, "largest gap {gap:.3} pp");
}

// the 11-dimensional bipolar chain is too autocorrelated at thinning 1 for
// this bound; thinning 10 keeps the gap well inside it
#[test]
fn bipolar_seeds_agree_with_thinning() {
    let gap = largest_gap_pp(&run(Mode::Bipolar, 10, 101), &run(Mode::Bipolar, 10, 202));
    assert!(gap <= MAX_GAP_PP, "largest gap {gap:.3} pp");
}
