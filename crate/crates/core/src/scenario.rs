//! Scenario files (JSON, `"format": 1`) describing a filtered space with
//! commuting nilpotent operators plus deformation parameters, the check
//! runner producing deterministic reports, and the built-in fixtures.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cohomology;
use crate::deformation::{self, DeformationFamily};
use crate::linalg::{Matrix, Subspace};
use crate::mhs::{
    DecreasingFiltration, FieldMode, IncreasingFiltration, MixedHodgeStructure, Pairing,
};
use crate::orbits::{self, NilpotentFamily, NilpotentOrbit};
use crate::params::{Assignment, ParamRing};
use crate::scalars::{rat, Field, Gauss};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScenarioParams {
    pub a: Gauss,
    #[serde(rename = "C")]
    pub big_c: Gauss,
    /// `None` keeps λ symbolic
    pub lambda: Option<Gauss>,
    pub n: usize,
    pub c: Vec<Gauss>,
    pub truncation: u32,
    pub seed: u64,
}

/// One numeric sample point: coordinates and λ as (re, im) pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Sample {
    pub t: Vec<(f64, f64)>,
    pub lambda: (f64, f64),
}

impl Sample {
    pub fn assignment(&self) -> Assignment {
        Assignment::new(
            self.t.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
            Complex64::new(self.lambda.0, self.lambda.1),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Scenario {
    pub format: u32,
    pub name: String,
    /// "rational" or "real-form"
    pub mode: String,
    pub dim: usize,
    pub basis: Vec<String>,
    /// weight of the would-be limit structure
    pub weight: i64,
    /// filtration level -> spanning vectors (each a coordinate vector)
    pub weight_filtration: BTreeMap<String, Vec<Vec<Gauss>>>,
    pub hodge_filtration: BTreeMap<String, Vec<Vec<Gauss>>>,
    pub operators: Vec<Vec<Vec<Gauss>>>,
    pub pairing: Option<Vec<Vec<Gauss>>>,
    /// distinguished frame for the deformation checks
    pub u_basis: Option<Vec<Vec<Gauss>>>,
    pub params: Option<ScenarioParams>,
    pub samples: Option<Vec<Sample>>,
    pub checks: Vec<String>,
}

fn parse_levels(
    dim: usize,
    raw: &BTreeMap<String, Vec<Vec<Gauss>>>,
) -> Result<BTreeMap<i64, Subspace<Gauss>>, String> {
    let mut out = BTreeMap::new();
    for (key, vectors) in raw {
        let level: i64 = key
            .parse()
            .map_err(|_| format!("filtration level '{key}' is not an integer"))?;
        for v in vectors {
            if v.len() != dim {
                return Err(format!(
                    "vector of length {} at level {key}, expected {dim}",
                    v.len()
                ));
            }
        }
        out.insert(level, Subspace::from_rows(dim, vectors.clone()));
    }
    Ok(out)
}

fn parse_matrix(dim: usize, rows: &[Vec<Gauss>]) -> Result<Matrix<Gauss>, String> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(format!("matrix is not {dim}x{dim}"));
    }
    Ok(Matrix::from_rows(rows.to_vec()))
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, String> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if s.format != FORMAT_VERSION {
            return Err(format!(
                "unsupported format {} (expected {FORMAT_VERSION})",
                s.format
            ));
        }
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.basis.len() != self.dim {
            return Err(format!(
                "{} basis labels for dimension {}",
                self.basis.len(),
                self.dim
            ));
        }
        self.mhs()?;
        self.family()?;
        if let Some(p) = &self.pairing {
            parse_matrix(self.dim, p)?;
        }
        if let Some(u) = &self.u_basis {
            if u.len() != 4 || u.iter().any(|v| v.len() != self.dim) {
                return Err("u_basis must hold four vectors of ambient dimension".into());
            }
        }
        if let Some(p) = &self.params {
            if p.c.len() != p.n {
                return Err(format!("c-vector has {} entries for n = {}", p.c.len(), p.n));
            }
        }
        Ok(())
    }

    pub fn mhs(&self) -> Result<MixedHodgeStructure, String> {
        let w = IncreasingFiltration::new(self.dim, parse_levels(self.dim, &self.weight_filtration)?)
            .map_err(|e| format!("weight filtration: {e}"))?;
        let f = DecreasingFiltration::new(self.dim, parse_levels(self.dim, &self.hodge_filtration)?)
            .map_err(|e| format!("hodge filtration: {e}"))?;
        let mode = match self.mode.as_str() {
            "rational" => FieldMode::Rational,
            "real-form" => FieldMode::RealForm,
            other => return Err(format!("unknown field mode '{other}'")),
        };
        MixedHodgeStructure::new(w, f, 0, mode).map_err(|e| format!("{e}"))
    }

    pub fn family(&self) -> Result<NilpotentFamily, String> {
        let ops = self
            .operators
            .iter()
            .map(|m| parse_matrix(self.dim, m))
            .collect::<Result<Vec<_>, _>>()?;
        NilpotentFamily::new(ops).map_err(|e| format!("{e}"))
    }

    pub fn pairing_data(&self) -> Result<Option<Pairing>, String> {
        match &self.pairing {
            None => Ok(None),
            Some(rows) => Ok(Some(Pairing::new(
                parse_matrix(self.dim, rows)?,
                self.weight,
                true,
            ))),
        }
    }

    pub fn orbit(&self) -> Result<NilpotentOrbit, String> {
        Ok(NilpotentOrbit {
            limit: self.mhs()?,
            family: self.family()?,
            pairing: self.pairing_data()?,
            weight: self.weight,
        })
    }

    /// The orbit with its single total operator repeated `n` times.
    pub fn pullback_orbit(&self, n: usize) -> Result<NilpotentOrbit, String> {
        let base = self.orbit()?;
        let total = base.family.total();
        Ok(NilpotentOrbit {
            family: NilpotentFamily::pullback(total, n).map_err(|e| format!("{e}"))?,
            ..base
        })
    }

    /// Build the deformed family from the stored frame and parameters.
    pub fn deformation(
        &self,
        truncation: Option<u32>,
        lambda: Option<Option<Gauss>>,
    ) -> Result<DeformationFamily, String> {
        let params = self
            .params
            .as_ref()
            .ok_or_else(|| "scenario has no deformation parameters".to_string())?;
        let u_raw = self
            .u_basis
            .as_ref()
            .ok_or_else(|| "scenario has no distinguished frame".to_string())?;
        let u: [Vec<Gauss>; 4] = [
            u_raw[0].clone(),
            u_raw[1].clone(),
            u_raw[2].clone(),
            u_raw[3].clone(),
        ];
        let pairing = self
            .pairing_data()?
            .ok_or_else(|| "deformation checks need a pairing".to_string())?;
        let mhs = self.mhs()?;
        let ring = ParamRing {
            n: params.n,
            trunc: truncation.unwrap_or(params.truncation),
        };
        deformation::build_family(
            &u,
            &params.a,
            &params.big_c,
            lambda.unwrap_or_else(|| params.lambda.clone()),
            &pairing,
            &mhs.weight,
            ring,
        )
        .map_err(|e| format!("{e}"))
    }

    /// Numeric samples: explicit list if present, otherwise the default grid.
    pub fn sample_grid(&self) -> Vec<Assignment> {
        if let Some(s) = &self.samples {
            return s.iter().map(Sample::assignment).collect();
        }
        let n = self.params.as_ref().map(|p| p.n).unwrap_or(1);
        let lambda = self
            .params
            .as_ref()
            .and_then(|p| p.lambda.as_ref())
            .map(|l| l.to_complex64())
            .unwrap_or(Complex64::new(0.0, 0.0));
        deformation::default_samples(n, lambda)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// stable identifier of the verification performed
    pub anchor: String,
    /// "pass" | "fail" | "error"
    pub status: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub format: u32,
    pub scenario: String,
    pub truncation: u32,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.scenario));
        for c in &self.checks {
            out.push_str(&format!("{:<24} [{}] {}", c.name, c.anchor, c.status));
            if !c.detail.is_empty() {
                out.push_str(&format!(" — {}", c.detail));
            }
            if let Some(d) = &c.dims {
                out.push_str(&format!(" dims={d:?}"));
            }
            out.push('\n');
        }
        out.push_str(if self.passed { "PASS\n" } else { "FAIL\n" });
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub truncation: Option<u32>,
    pub seed: Option<u64>,
    pub samples: Option<Vec<Assignment>>,
    pub tolerance: Option<f64>,
}

fn result(name: &str, anchor: &str, ok: Result<(String, Option<Vec<usize>>), String>) -> CheckResult {
    match ok {
        Ok((detail, dims)) => CheckResult {
            name: name.into(),
            anchor: anchor.into(),
            status: "pass".into(),
            detail,
            dims,
        },
        Err(detail) => CheckResult {
            name: name.into(),
            anchor: anchor.into(),
            status: "fail".into(),
            detail,
            dims: None,
        },
    }
}

/// Canonical execution order so dependent checks always follow their inputs.
fn check_order(name: &str) -> usize {
    const ORDER: &[&str] = &[
        "mhs",
        "orbit",
        "prop21",
        "h1",
        "h1-dims",
        "vanishing-criterion",
        "class-roundtrip",
        "transversality",
        "conjugate-frame",
        "orthogonality",
        "frame-independence",
        "limit-fiber",
        "positivity",
        "theorem15",
        "certify",
    ];
    ORDER.iter().position(|&c| c == name).unwrap_or(ORDER.len())
}

pub fn run(scenario: &Scenario, opts: &RunOptions) -> Report {
    let tol = opts.tolerance.unwrap_or(1e-9);
    let trunc = opts
        .truncation
        .or_else(|| scenario.params.as_ref().map(|p| p.truncation))
        .unwrap_or(6);
    let seed = opts
        .seed
        .or_else(|| scenario.params.as_ref().map(|p| p.seed))
        .unwrap_or(0);
    let mut names = scenario.checks.clone();
    names.sort_by_key(|n| check_order(n));
    let mut checks = Vec::new();
    for name in &names {
        checks.push(run_check(scenario, name, trunc, tol, opts));
    }
    let passed = checks.iter().all(|c| c.status == "pass");
    Report {
        format: FORMAT_VERSION,
        scenario: scenario.name.clone(),
        truncation: trunc,
        seed,
        checks,
        passed,
    }
}

fn run_check(
    scenario: &Scenario,
    name: &str,
    trunc: u32,
    tol: f64,
    opts: &RunOptions,
) -> CheckResult {
    let deformation = |lambda: Option<Option<Gauss>>| scenario.deformation(Some(trunc), lambda);
    match name {
        "mhs" => result(name, "graded-purity", {
            scenario
                .mhs()
                .and_then(|m| m.check_mhs().map_err(|w| {
                    format!("purity fails on level {} at p = {}", w.level, w.p)
                }))
                .map(|_| ("graded pieces are pure".into(), None))
        }),
        "orbit" => result(name, "orbit-axioms", {
            scenario.orbit().and_then(|o| {
                orbits::check_pure_nilpotent_orbit(&o)
                    .map_err(|e| format!("{e}"))
                    .map(|_| ("orbit axioms hold".into(), None))
            })
        }),
        "prop21" => result(name, "distinguished-frame", {
            scenario.orbit().and_then(|o| {
                let basis = orbits::construct_prop21_basis(&o).map_err(|e| format!("{e}"))?;
                let pairing = o.pairing.as_ref().ok_or("orbit has no pairing")?;
                let bad = orbits::validate_prop21_basis(
                    &o.limit,
                    &o.family.total(),
                    pairing,
                    &basis.u,
                    &basis.a,
                );
                if bad.is_empty() {
                    Ok(("constructed frame satisfies all conditions".into(), None))
                } else {
                    Err(bad.join("; "))
                }
            })
        }),
        "h1" => result(name, "intersection-h1", {
            scenario.mhs().and_then(|m| {
                let fam = scenario.family()?;
                let dim = cohomology::ic_complex(&m, &fam).h(1).space.dim();
                Ok((format!("dim H^1 = {dim}"), Some(vec![dim])))
            })
        }),
        "h1-dims" => result(name, "pullback-h1-dims", {
            (1..=5usize)
                .map(|n| {
                    let orbit = scenario.pullback_orbit(n)?;
                    Ok(cohomology::ic_complex(&orbit.limit, &orbit.family)
                        .h(1)
                        .space
                        .dim())
                })
                .collect::<Result<Vec<_>, String>>()
                .and_then(|dims| {
                    let expect: Vec<usize> = (0..5).collect();
                    if dims == expect {
                        Ok(("dim H^1 = n-1 for n = 1..5".into(), Some(dims)))
                    } else {
                        Err(format!("unexpected dims {dims:?}"))
                    }
                })
        }),
        "vanishing-criterion" => result(name, "graded-kernel-criterion", {
            scenario.mhs().and_then(|m| {
                let fam = scenario.family()?;
                cohomology::check_remark24_vanishing(&m, &fam)
                    .map_err(|e| format!("{e}"))
                    .map(|v| (format!("criterion = {v}"), None))
            })
        }),
        "class-roundtrip" => result(name, "class-roundtrip", {
            let n = scenario.params.as_ref().map(|p| p.n).unwrap_or(2).max(2);
            scenario.pullback_orbit(n).and_then(|orbit| {
                let target = cohomology::ic_complex(&orbit.limit, &orbit.family)
                    .h(1)
                    .space
                    .dim();
                let mut alpha = vec![Gauss::zero(); target];
                if let Some(x) = alpha.first_mut() {
                    *x = Gauss::one();
                }
                let ext = cohomology::build_extension(&orbit, &alpha)
                    .map_err(|e| format!("{e}"))?;
                let cls = cohomology::class_of_extension(&ext).map_err(|e| format!("{e}"))?;
                if cls.class == alpha {
                    Ok((format!("round trip exact in dimension {target}"), Some(vec![target])))
                } else {
                    Err("recovered class differs".into())
                }
            })
        }),
        "transversality" => result(name, "frame-derivation", {
            deformation(None).and_then(|f| {
                f.check_transversality()
                    .map_err(|e| format!("{e}"))
                    .map(|_| ("all derivation identities exact".into(), None))
            })
        }),
        "conjugate-frame" => result(name, "conjugate-frame", {
            deformation(None).and_then(|f| {
                f.check_conjugate_frame()
                    .map_err(|e| format!("{e}"))
                    .map(|_| ("conjugate frame matches closed form".into(), None))
            })
        }),
        "orthogonality" => result(name, "frame-orthogonality", {
            deformation(None).and_then(|f| {
                f.check_orthogonality()
                    .map_err(|w| format!("nonzero pairing witness: {w}"))
                    .map(|_| ("filtration levels pair to zero".into(), None))
            })
        }),
        "frame-independence" => result(name, "frame-determinant", {
            deformation(None).and_then(|f| {
                let det0 = f
                    .frame_determinant()
                    .subst_lambda(&Gauss::zero())
                    .constant_term();
                if det0 != Gauss::from_i64(-1) {
                    return Err(format!("determinant at λ = 0 is {det0}, expected -1"));
                }
                let samples = opts
                    .samples
                    .clone()
                    .unwrap_or_else(|| scenario.sample_grid());
                for s in &samples {
                    f.check_frame_independence(s, tol).map_err(|e| format!("{e}"))?;
                }
                Ok((format!("determinant -1 at λ = 0; nonzero at {} samples", samples.len()), None))
            })
        }),
        "limit-fiber" => result(name, "boundary-fiber", {
            deformation(None).and_then(|f| {
                let limit = f.limit_fiber().map_err(|e| format!("{e}"))?;
                limit
                    .check_mhs()
                    .map_err(|w| format!("purity fails on level {} at p = {}", w.level, w.p))?;
                let expected = scenario.mhs()?;
                if limit.hodge.equivalent(&expected.hodge) && limit.weight.equivalent(&expected.weight)
                {
                    Ok(("boundary fiber is λ-free and matches the scenario".into(), None))
                } else {
                    Err("boundary fiber differs from the scenario structure".into())
                }
            })
        }),
        "positivity" => result(name, "hermitian-signs", {
            deformation(None).and_then(|f| {
                let samples = opts
                    .samples
                    .clone()
                    .unwrap_or_else(|| scenario.sample_grid());
                let mut min_margin = f64::INFINITY;
                for s in &samples {
                    let signs = f.check_positivity(s, tol).map_err(|e| format!("{e}"))?;
                    for v in signs {
                        min_margin = min_margin.min(v);
                    }
                }
                Ok((
                    format!(
                        "all signs positive over {} samples (min margin {:.3e})",
                        samples.len(),
                        min_margin
                    ),
                    None,
                ))
            })
        }),
        "theorem15" => result(name, "filtration-stability", {
            deformation(None).and_then(|f| {
                let symbolic = matches!(f.lambda, None);
                match f.check_theorem15_hypothesis() {
                    Ok(()) => Ok(("next-to-last level stable under derivations".into(), None)),
                    Err((k, w)) if symbolic || f.lambda != Some(Gauss::zero()) => Ok((
                        format!("unstable as expected: derivation {} leaves remainder {}", k + 1, w),
                        None,
                    )),
                    Err((k, w)) => {
                        Err(format!("derivation {} leaves remainder {}", k + 1, w))
                    }
                }
            })
        }),
        "certify" => result(name, "vanishing-certificate", (|| {
            let params = scenario
                .params
                .clone()
                .ok_or_else(|| "scenario has no parameters".to_string())?;
            scenario.pullback_orbit(params.n).and_then(|orbit| {
                let fam = deformation(Some(None))?;
                let feas = params
                    .lambda
                    .clone()
                    .map(|l| (l, params.c.clone(), trunc.min(3)));
                let cert = deformation::theorem23_certificate(&orbit, &fam, feas)
                    .map_err(|e| format!("{e}"))?;
                let idents: Vec<String> = cert
                    .identities
                    .iter()
                    .map(|((k, kp), e)| format!("λ(c_{} - c_{}) = 0 [{}]", k + 1, kp + 1, e))
                    .collect();
                let feas_txt = match &cert.feasibility {
                    None => "feasibility not requested".to_string(),
                    Some(r) => format!(
                        "λ = {}, c = {:?}, D = {}: {}",
                        r.lambda,
                        r.c.iter().map(|x| format!("{x}")).collect::<Vec<_>>(),
                        r.truncation,
                        if r.feasible { "feasible" } else { "infeasible" }
                    ),
                };
                Ok((
                    format!(
                        "target dim {}; identities: {}; {}",
                        cert.target_dim,
                        idents.join(", "),
                        feas_txt
                    ),
                    Some(vec![cert.target_dim]),
                ))
            })
        })()),
        other => CheckResult {
            name: other.into(),
            anchor: "unknown".into(),
            status: "fail".into(),
            detail: format!("unknown check '{other}'"),
            dims: None,
        },
    }
}

/// Built-in scenarios used by the test suite and shipped as JSON fixtures.
pub mod fixtures {
    use super::*;

    fn g(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Gauss {
        Gauss::new(rat(re_n, re_d), rat(im_n, im_d))
    }

    fn gi(re: i64, im: i64) -> Gauss {
        g(re, 1, im, 1)
    }

    /// Four-dimensional weight −1 orbit with a one-dimensional image of the
    /// nilpotent operator; the base example for every deformation check.
    pub fn h1_orbit() -> Scenario {
        let e = |i: usize| {
            let mut v = vec![Gauss::zero(); 4];
            v[i] = Gauss::one();
            v
        };
        let u1 = vec![gi(1, 0), gi(0, 0), gi(0, 0), gi(0, 1)];
        let u2 = e(1);
        let u3 = vec![gi(0, 0), gi(0, 0), gi(0, 1), gi(0, 0)];
        let u4 = vec![gi(1, 0), gi(0, 0), gi(0, 0), gi(0, -1)];
        let f0_extra = vec![gi(0, 0), gi(1, 0), gi(-1, 0), gi(0, 0)]; // u_2 + i·u_3
        let mut weight_filtration = BTreeMap::new();
        weight_filtration.insert("-2".to_string(), vec![e(2)]);
        weight_filtration.insert("-1".to_string(), vec![e(0), e(2), e(3)]);
        weight_filtration.insert("0".to_string(), vec![e(0), e(1), e(2), e(3)]);
        let mut hodge_filtration = BTreeMap::new();
        hodge_filtration.insert("1".to_string(), vec![u1.clone()]);
        hodge_filtration.insert("0".to_string(), vec![u1.clone(), f0_extra.clone()]);
        hodge_filtration.insert("-1".to_string(), vec![u1.clone(), f0_extra, e(2)]);
        hodge_filtration.insert("-2".to_string(), vec![e(0), e(1), e(2), e(3)]);
        // N e_2 = i e_3
        let mut n = vec![vec![Gauss::zero(); 4]; 4];
        n[2][1] = gi(0, 1);
        // pairing: <e_1, e_4> = 1/2, <e_2, e_3> = -1
        let mut b = vec![vec![Gauss::zero(); 4]; 4];
        b[0][3] = g(1, 2, 0, 1);
        b[3][0] = g(-1, 2, 0, 1);
        b[1][2] = gi(-1, 0);
        b[2][1] = gi(1, 0);
        Scenario {
            format: FORMAT_VERSION,
            name: "h1_orbit".into(),
            mode: "real-form".into(),
            dim: 4,
            basis: vec!["e1".into(), "e2".into(), "e3".into(), "e4".into()],
            weight: -1,
            weight_filtration,
            hodge_filtration,
            operators: vec![n],
            pairing: Some(b),
            u_basis: Some(vec![u1, u2, u3, u4]),
            params: Some(ScenarioParams {
                a: gi(1, 1),
                big_c: gi(1, 0),
                lambda: None,
                n: 2,
                c: vec![gi(1, 0), gi(0, 0)],
                truncation: 6,
                seed: 0,
            }),
            samples: None,
            checks: vec![
                "mhs".into(),
                "orbit".into(),
                "prop21".into(),
                "h1".into(),
                "h1-dims".into(),
                "vanishing-criterion".into(),
                "class-roundtrip".into(),
                "transversality".into(),
                "conjugate-frame".into(),
                "orthogonality".into(),
                "frame-independence".into(),
                "limit-fiber".into(),
                "theorem15".into(),
                "certify".into(),
            ],
        }
    }

    /// Three-operator example on a four-dimensional space whose degree-1
    /// intersection cohomology is one-dimensional.
    pub fn remark25() -> Scenario {
        let e = |i: usize| {
            let mut v = vec![Gauss::zero(); 4];
            v[i] = Gauss::one();
            v
        };
        let mut weight_filtration = BTreeMap::new();
        weight_filtration.insert("-2".to_string(), vec![e(2), e(3)]);
        weight_filtration.insert("0".to_string(), vec![e(0), e(1), e(2), e(3)]);
        let mut hodge_filtration = BTreeMap::new();
        hodge_filtration.insert("0".to_string(), vec![e(0), e(1)]);
        hodge_filtration.insert("-1".to_string(), vec![e(0), e(1), e(2), e(3)]);
        let mat = |pairs: &[(usize, usize)]| {
            let mut m = vec![vec![Gauss::zero(); 4]; 4];
            for &(r, c) in pairs {
                m[r][c] = Gauss::one();
            }
            m
        };
        Scenario {
            format: FORMAT_VERSION,
            name: "remark25".into(),
            mode: "rational".into(),
            dim: 4,
            basis: vec!["f1".into(), "f2".into(), "g1".into(), "g2".into()],
            weight: 0,
            weight_filtration,
            hodge_filtration,
            operators: vec![
                mat(&[(2, 0)]),
                mat(&[(3, 1)]),
                mat(&[(2, 0), (2, 1), (3, 0), (3, 1)]),
            ],
            pairing: None,
            u_basis: None,
            params: None,
            samples: None,
            checks: vec!["mhs".into(), "h1".into()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate_and_round_trip() {
        for s in [fixtures::h1_orbit(), fixtures::remark25()] {
            s.validate().unwrap();
            let back = Scenario::from_json(&s.to_json()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn h1_orbit_full_run_passes() {
        let s = fixtures::h1_orbit();
        let report = run(&s, &RunOptions::default());
        for c in &report.checks {
            assert_eq!(c.status, "pass", "{}: {}", c.name, c.detail);
        }
        assert!(report.passed);
    }

    #[test]
    fn remark25_run_reports_dimension_one() {
        let s = fixtures::remark25();
        let report = run(&s, &RunOptions::default());
        assert!(report.passed);
        let h1 = report.checks.iter().find(|c| c.name == "h1").unwrap();
        assert_eq!(h1.dims, Some(vec![1]));
    }

    #[test]
    fn reports_are_byte_stable() {
        let s = fixtures::h1_orbit();
        let a = run(&s, &RunOptions::default()).to_json();
        let b = run(&s, &RunOptions::default()).to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn malformed_filtration_is_rejected_by_name() {
        let mut s = fixtures::h1_orbit();
        // shrink the top level below a lower one
        s.weight_filtration
            .insert("0".to_string(), vec![vec![
                Gauss::one(),
                Gauss::zero(),
                Gauss::zero(),
                Gauss::zero(),
            ]]);
        let err = Scenario::from_json(&s.to_json()).unwrap_err();
        assert!(err.contains("weight filtration"), "{err}");
    }

    #[test]
    fn unknown_check_fails_cleanly() {
        let mut s = fixtures::remark25();
        s.checks.push("nonsense".into());
        let report = run(&s, &RunOptions::default());
        assert!(!report.passed);
    }
}
