//! The `experiment` and `identity-check` subcommands: RMS curves per
//! generator family and integrand, rate fits, the weighted-block
//! comparison, the off-schedule probe, and the exact-identity sweep, all
//! reduced to named PASS/FAIL properties.

use extquad::quadrature::{
    derive_seed, fit_rate, rms_profile, rms_sample_sizes, run_identity_suite,
    weighted_block_estimate, ErrorProfile, Integrand, KahanSum, PointSequence,
    QuadratureError, ReplicatedSequence,
};

use crate::report::{sig, Csv};

/// Slope window for plain Monte Carlo on `f(x) = x`.
const IID_SLOPE_WINDOW: (f64, f64) = (-0.6, -0.4);
/// Scrambled-net and weighted-block slopes must reach at least this.
const FAST_SLOPE_MAX: f64 = -1.3;
/// Off-schedule RMS must exceed the dyadic interpolation by this factor.
const OFF_SCHEDULE_MIN_RATIO: f64 = 1.5;
/// Off-schedule probe level: compares n = 3*2^k/2 against 2^k and 2^(k+1).
const OFF_SCHEDULE_K: u32 = 10;

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
struct CurveRow {
    generator: String,
    integrand: String,
    n: u64,
    rms: f64,
    slope_so_far: Option<f64>,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    rows: Vec<CurveRow>,
    pub properties: Vec<PropertyResult>,
    seed: u64,
    replicates: u32,
}

impl ExperimentOutput {
    pub fn pass(&self) -> bool {
        self.properties.iter().all(|p| p.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new();
        csv.comment(&format!(
            "experiment seed={} replicates={} sizes=2^4..2^12",
            self.seed, self.replicates
        ));
        csv.header(&["generator", "integrand", "n", "rms", "slope_so_far"]);
        for row in &self.rows {
            csv.row(&[
                row.generator.clone(),
                row.integrand.clone(),
                row.n.to_string(),
                sig(row.rms),
                row.slope_so_far.map(sig).unwrap_or_default(),
            ]);
        }
        for p in &self.properties {
            csv.comment(&format!(
                "{}: {} {}",
                p.name,
                p.detail,
                if p.pass { "PASS" } else { "FAIL" }
            ));
        }
        csv.comment(&format!("result: {}", if self.pass() { "PASS" } else { "FAIL" }));
        csv.finish()
    }

    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "experiment (seed {}, {} replicates, n = 2^4..2^12)\n\n",
            self.seed, self.replicates
        ));
        let mut current = String::new();
        for row in &self.rows {
            let key = format!("{} / {}", row.generator, row.integrand);
            if key != current {
                out.push_str(&format!("  {key}\n"));
                current = key;
            }
            out.push_str(&format!(
                "    n = {:>5}  rms = {:<18}{}\n",
                row.n,
                sig(row.rms),
                row.slope_so_far
                    .map(|s| format!("  slope so far {}", sig_short(s)))
                    .unwrap_or_default()
            ));
        }
        out.push('\n');
        for p in &self.properties {
            out.push_str(&format!(
                "  {:<28} {}  [{}]\n",
                p.name,
                p.detail,
                if p.pass { "PASS" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "\nresult: {}\n",
            if self.pass() { "PASS" } else { "FAIL" }
        ));
        out
    }
}

fn sig_short(x: f64) -> String {
    crate::report::sig_n(x, 4)
}

fn one_d_families(seed: u64) -> Vec<(&'static str, ReplicatedSequence)> {
    vec![
        (
            "iid",
            ReplicatedSequence::new(
                PointSequence::iid_uniform(1, 0).expect("dim 1"),
                derive_seed(seed, 1),
            )
            .expect("randomized"),
        ),
        (
            "shifted_vdc",
            ReplicatedSequence::new(
                PointSequence::van_der_corput(2)
                    .expect("base 2")
                    .random_shift(0)
                    .expect("deterministic base"),
                derive_seed(seed, 2),
            )
            .expect("randomized"),
        ),
        (
            "scrambled_vdc",
            ReplicatedSequence::new(
                PointSequence::scrambled_base2(0),
                derive_seed(seed, 3),
            )
            .expect("randomized"),
        ),
    ]
}

fn two_d_families(seed: u64) -> Vec<(&'static str, ReplicatedSequence)> {
    vec![
        (
            "iid2",
            ReplicatedSequence::new(
                PointSequence::iid_uniform(2, 0).expect("dim 2"),
                derive_seed(seed, 4),
            )
            .expect("randomized"),
        ),
        (
            "shifted_halton2",
            ReplicatedSequence::new(
                PointSequence::halton(2)
                    .expect("two primes")
                    .random_shift(0)
                    .expect("deterministic base"),
                derive_seed(seed, 5),
            )
            .expect("randomized"),
        ),
    ]
}

fn push_curve(
    rows: &mut Vec<CurveRow>,
    generator: &str,
    integrand: &str,
    profile: &ErrorProfile,
) {
    for k in 0..profile.len() {
        let slope = if k + 1 >= 3 {
            fit_rate(&profile.prefix(k + 1)).ok().map(|f| f.slope)
        } else {
            None
        };
        rows.push(CurveRow {
            generator: generator.to_string(),
            integrand: integrand.to_string(),
            n: profile.sample_sizes()[k],
            rms: profile.eta()[k],
            slope_so_far: slope,
        });
    }
}

pub fn run_experiment(seed: u64, replicates: u32) -> Result<ExperimentOutput, QuadratureError> {
    let ns = rms_sample_sizes();
    let suite = Integrand::suite();
    let mut rows = Vec::new();
    let mut properties = Vec::new();

    // identity sweep first: a residual here is an implementation bug
    let identities = run_identity_suite(seed);
    properties.push(PropertyResult {
        name: "identity_suite".to_string(),
        detail: format!(
            "{} cases, max scaled residual {:.3e} (tol {:.0e})",
            identities.len(),
            identities.max_scaled_residual,
            identities.tolerance
        ),
        pass: identities.pass,
    });

    let mut iid_x_slope = None;
    let mut scrambled_x2_slope = None;

    for (name, factory) in one_d_families(seed) {
        for f in suite.iter().filter(|f| f.dimension() == 1) {
            let profile = rms_profile(&factory, f, &ns, replicates)?;
            push_curve(&mut rows, name, f.label(), &profile);
            if let Ok(fit) = fit_rate(&profile) {
                if name == "iid" && f.label() == "x" {
                    iid_x_slope = Some(fit.slope);
                }
                if name == "scrambled_vdc" && f.label() == "x2" {
                    scrambled_x2_slope = Some(fit.slope);
                }
            }
        }
    }
    for (name, factory) in two_d_families(seed) {
        for f in suite.iter().filter(|f| f.dimension() == 2) {
            let profile = rms_profile(&factory, f, &ns, replicates)?;
            push_curve(&mut rows, name, f.label(), &profile);
        }
    }

    let iid_slope = iid_x_slope.expect("iid curve fitted");
    properties.push(PropertyResult {
        name: "iid_rate_window".to_string(),
        detail: format!(
            "slope {} in [{}, {}]",
            sig_short(iid_slope),
            IID_SLOPE_WINDOW.0,
            IID_SLOPE_WINDOW.1
        ),
        pass: iid_slope > IID_SLOPE_WINDOW.0 && iid_slope < IID_SLOPE_WINDOW.1,
    });

    let scr_slope = scrambled_x2_slope.expect("scrambled curve fitted");
    properties.push(PropertyResult {
        name: "scrambled_rate".to_string(),
        detail: format!("slope {} <= {}", sig_short(scr_slope), FAST_SLOPE_MAX),
        pass: scr_slope <= FAST_SLOPE_MAX,
    });

    // weighted-block comparison: geometric blocks 1, 2, ..., 2^(K-1) with
    // weights ~ n_j^2 over scrambled replicates
    let f_smooth = suite.iter().find(|f| f.label() == "x2").expect("suite");
    let weighted_factory = ReplicatedSequence::new(
        PointSequence::scrambled_base2(0),
        derive_seed(seed, 6),
    )
    .expect("randomized");
    let mut totals = Vec::new();
    let mut rms = Vec::new();
    for cap in 6..=12u32 {
        let blocks: Vec<u64> = (0..cap).map(|j| 1u64 << j).collect();
        let total: u64 = blocks.iter().sum();
        let mut sq = KahanSum::default();
        for r in 0..replicates {
            let seq = weighted_factory.replicate(r);
            let est = weighted_block_estimate(&seq, f_smooth, &blocks, 2.0)?;
            let err = est - f_smooth.true_mean();
            sq.add(err * err);
        }
        totals.push(total);
        rms.push((sq.value() / replicates as f64).sqrt());
    }
    let weighted_profile = ErrorProfile::new(totals, rms)?;
    push_curve(&mut rows, "weighted_scrambled_vdc", "x2", &weighted_profile);
    let weighted_slope = fit_rate(&weighted_profile)?.slope;
    properties.push(PropertyResult {
        name: "weighted_block_rate".to_string(),
        detail: format!("slope {} <= {}", sig_short(weighted_slope), FAST_SLOPE_MAX),
        pass: weighted_slope <= FAST_SLOPE_MAX,
    });

    // off-schedule probe: the fast rate lives on the dyadic subsequence
    let off_factory = ReplicatedSequence::new(
        PointSequence::scrambled_base2(0),
        derive_seed(seed, 7),
    )
    .expect("randomized");
    let n_lo = 1u64 << OFF_SCHEDULE_K;
    let n_off = 3 * (1u64 << OFF_SCHEDULE_K) / 2;
    let n_hi = 1u64 << (OFF_SCHEDULE_K + 1);
    let off = rms_profile(&off_factory, f_smooth, &[n_lo, n_off, n_hi], replicates)?;
    push_curve(&mut rows, "scrambled_vdc_offgrid", "x2", &off);
    let ratio = off.eta()[1] / (off.eta()[0] * off.eta()[2]).sqrt();
    properties.push(PropertyResult {
        name: "off_schedule_degradation".to_string(),
        detail: format!(
            "rms({n_off}) / interp = {} >= {}",
            sig_short(ratio),
            OFF_SCHEDULE_MIN_RATIO
        ),
        pass: ratio >= OFF_SCHEDULE_MIN_RATIO,
    });

    Ok(ExperimentOutput { rows, properties, seed, replicates })
}

#[derive(Debug)]
pub struct IdentityOutput {
    report: extquad::quadrature::IdentitySuiteReport,
    seed: u64,
}

impl IdentityOutput {
    pub fn pass(&self) -> bool {
        self.report.pass
    }

    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new();
        csv.comment(&format!("identity suite seed={}", self.seed));
        csv.header(&["generator", "integrand", "n", "sobol_residual", "block_residual"]);
        for case in &self.report.cases {
            csv.row(&[
                case.generator.clone(),
                case.integrand.clone(),
                case.n.to_string(),
                sig(case.sobol_residual),
                sig(case.block_residual),
            ]);
        }
        csv.comment(&format!(
            "cases={} max_scaled_residual={:.3e} tolerance={:.0e}",
            self.report.len(),
            self.report.max_scaled_residual,
            self.report.tolerance
        ));
        csv.comment(&format!("result: {}", if self.pass() { "PASS" } else { "FAIL" }));
        csv.finish()
    }

    pub fn to_pretty(&self) -> String {
        let failing: Vec<_> = self.report.cases.iter().filter(|c| !c.pass).collect();
        let mut out = format!(
            "identity suite: {} cases, max scaled residual {:.3e} (tolerance {:.0e})\n",
            self.report.len(),
            self.report.max_scaled_residual,
            self.report.tolerance
        );
        if failing.is_empty() {
            out.push_str("all identities hold: PASS\n");
        } else {
            for c in &failing {
                out.push_str(&format!(
                    "  FAIL {} / {} at n = {}: sobol {:.3e}, block {:.3e}\n",
                    c.generator, c.integrand, c.n, c.sobol_residual, c.block_residual
                ));
            }
            out.push_str("result: FAIL\n");
        }
        out
    }
}

pub fn run_identity_check(seed: u64) -> IdentityOutput {
    IdentityOutput { report: run_identity_suite(seed), seed }
}
