use nbwht::approx::{approx_expected_counts, relative_additions_sweep};
use nbwht::convolution::{cost_compare, oracle_check, ORACLE_TOLERANCE};
use nbwht::exact::{exact_table, ExpansionTerm};
use nbwht::montecarlo::{self, Evidence};
use nbwht::wht::{count_only, PatternMask};
use nbwht::Result;

use crate::report::{Cell, Report, Section};

/// Output of a command plus whether its checks passed.
pub struct Outcome {
    pub report: Report,
    pub pass: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, pass: true }
    }
}

/// Weights listed in the length-64 table.
pub const TABLE2_WEIGHTS: [usize; 26] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 32, 64,
];

const EXPANSION_HEADERS: [&str; 8] = [
    "q_prime",
    "q_left",
    "q_right",
    "weight",
    "left",
    "right",
    "extra",
    "expectation",
];

pub fn table1() -> Result<Outcome> {
    let table = exact_table(4)?;
    let mut sections = Vec::new();

    for (title, pick) in [("q=2 additions", true), ("q=2 negations", false)] {
        let mut s = Section::new(title, EXPANSION_HEADERS.to_vec());
        for (qp, e) in table.row(2)?.iter().enumerate() {
            let v = if pick { &e.additions } else { &e.negations };
            let mut row = vec![Cell::from(qp)];
            row.extend(std::iter::repeat_n(Cell::Empty, 6));
            row.push(v.to_string().into());
            s.push(row);
        }
        sections.push(s);
    }

    for (title, pick) in [("q=4 additions", true), ("q=4 negations", false)] {
        let mut s = Section::new(title, EXPANSION_HEADERS.to_vec());
        for qp in 0..=4 {
            let total = table.get(4, qp)?;
            let total = if pick {
                &total.additions
            } else {
                &total.negations
            };
            // left-heavy splits first
            let terms: Vec<ExpansionTerm> = table.expansion(4, qp)?.into_iter().rev().collect();
            let last = terms.len() - 1;
            for (k, t) in terms.iter().enumerate() {
                let (l, r, extra) = if pick {
                    (&t.left.additions, &t.right.additions, t.extra_additions)
                } else {
                    (&t.left.negations, &t.right.negations, t.extra_negations)
                };
                s.push(vec![
                    if k == 0 { Cell::from(qp) } else { Cell::Empty },
                    t.q_left.into(),
                    t.q_right.into(),
                    t.weight.to_string().into(),
                    l.to_string().into(),
                    r.to_string().into(),
                    extra.into(),
                    if k == last {
                        total.to_string().into()
                    } else {
                        Cell::Empty
                    },
                ]);
            }
        }
        sections.push(s);
    }
    Ok(Report {
        sections,
        text: None,
    }
    .into())
}

pub fn table2() -> Result<Outcome> {
    let q = 64;
    let table = exact_table(q)?;
    let mut s = Section::new(
        "",
        vec![
            "q_prime",
            "approx_additions",
            "approx_negations",
            "exact_additions",
            "exact_negations",
        ],
    );
    for qp in TABLE2_WEIGHTS {
        let a = approx_expected_counts(q, qp)?;
        let e = table.get(q, qp)?;
        s.push(vec![
            qp.into(),
            a.additions.into(),
            a.negations.into(),
            e.additions_f64().into(),
            e.negations_f64().into(),
        ]);
    }
    Ok(Report::single(s).into())
}

pub fn fig3(q_prime: usize, q_min: usize, q_max: usize) -> Result<Outcome> {
    let mut s = Section::new("", vec!["q", "log2_q", "ratio"]);
    for p in relative_additions_sweep(q_min, q_max, q_prime)? {
        s.push(vec![p.q.into(), (p.log2_q as u64).into(), p.ratio.into()]);
    }
    Ok(Report::single(s).into())
}

pub fn count(q: usize, mask_hex: &str) -> Result<Outcome> {
    let mask = PatternMask::from_hex(q, mask_hex)?;
    let c = count_only(&mask);
    let mut s = Section::new("", vec!["q", "mask", "weight", "additions", "negations"]);
    s.push(vec![
        q.into(),
        mask.to_hex().into(),
        mask.weight().into(),
        c.additions.into(),
        c.negations.into(),
    ]);
    let mut report = Report::single(s);
    report.text = Some(format!("{c}\n"));
    Ok(report.into())
}

pub fn validate(q: usize, q_prime: usize, trials: u64, seed: u64) -> Result<Outcome> {
    let v = montecarlo::validate(q, q_prime, trials, seed)?;
    let mut s = Section::new(
        "",
        vec![
            "q",
            "q_prime",
            "mode",
            "trials",
            "seed",
            "exact_additions",
            "exact_negations",
            "mean_additions",
            "mean_negations",
            "stderr_additions",
            "stderr_negations",
            "z_additions",
            "z_negations",
            "status",
        ],
    );
    s.vertical = true;
    let status = if v.pass { "pass" } else { "FAIL" };
    let (ea, en) = (v.exact.additions_f64(), v.exact.negations_f64());
    let mut row: Vec<Cell> = vec![q.into(), q_prime.into()];
    match &v.evidence {
        Evidence::Exhaustive(mean) => row.extend([
            "exhaustive".into(),
            Cell::from(nbwht::exact::binomial(q, q_prime).to_string()),
            Cell::Empty,
            v.exact.additions.to_string().into(),
            v.exact.negations.to_string().into(),
            mean.additions.to_string().into(),
            mean.negations.to_string().into(),
            0.0.into(),
            0.0.into(),
            Cell::Empty,
            Cell::Empty,
        ]),
        Evidence::Sampled(stats) => {
            let z = |m: f64, e: f64, se: f64| {
                if se > 0.0 {
                    Cell::from((m - e) / se)
                } else {
                    Cell::Empty
                }
            };
            row.extend([
                "sampled".into(),
                stats.trials.into(),
                stats.seed.into(),
                v.exact.additions.to_string().into(),
                v.exact.negations.to_string().into(),
                stats.mean_additions.into(),
                stats.mean_negations.into(),
                stats.stderr_additions.into(),
                stats.stderr_negations.into(),
                z(stats.mean_additions, ea, stats.stderr_additions),
                z(stats.mean_negations, en, stats.stderr_negations),
            ]);
        }
    }
    row.push(status.into());
    s.push(row);
    Ok(Outcome {
        report: Report::single(s),
        pass: v.pass,
    })
}

pub fn conv_check(q: usize, trials: u64, seed: u64) -> Result<Outcome> {
    let r = oracle_check(q, trials, seed)?;
    let mut s = Section::new(
        "",
        vec![
            "q",
            "trials",
            "seed",
            "tolerance",
            "max_relative_error",
            "max_mass_error",
            "max_identity_error",
            "failed_trials",
            "status",
        ],
    );
    s.vertical = true;
    let failed = r
        .failures
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    // errors are tiny; print them in full even in text mode
    let sci = |x: f64| Cell::from(format!("{x:.3e}"));
    s.push(vec![
        q.into(),
        trials.into(),
        seed.into(),
        sci(ORACLE_TOLERANCE),
        sci(r.max_relative_error),
        sci(r.max_mass_error),
        sci(r.max_identity_error),
        failed.into(),
        (if r.pass() { "pass" } else { "FAIL" }).into(),
    ]);
    Ok(Outcome {
        report: Report::single(s),
        pass: r.pass(),
    })
}

pub fn cost(q: usize, q_prime: usize, d_c: usize) -> Result<Outcome> {
    let mut s = Section::new(
        "",
        vec!["model", "multiplications", "additions", "negations"],
    );
    for m in cost_compare(q, q_prime, d_c)? {
        s.push(vec![
            m.label.into(),
            m.multiplications.into(),
            m.additions.into(),
            m.negations.into(),
        ]);
    }
    Ok(Report::single(s).into())
}
