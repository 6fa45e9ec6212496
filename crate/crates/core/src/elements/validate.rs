//! Cross-check of the closed-form step matrices against the derivation
//! oracles, in exact rational arithmetic.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::elements::derive::derive_matrices_exact;
use crate::elements::published::{conservative_table, corrected, printed, MatrixName, ERRATA, TABLE_ERRATA};
use crate::elements::{AlgorithmId, Coefficients, StepSystem};
use crate::linalg::Mat;
use crate::scalar::{rat, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Pass,
    Mismatch,
    Skipped,
}

impl RowStatus {
    pub fn label(self) -> &'static str {
        match self {
            RowStatus::Pass => "PASS",
            RowStatus::Mismatch => "MISMATCH",
            RowStatus::Skipped => "SKIPPED",
        }
    }
}

/// How a mismatch in a row is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Published matrices that must equal the derivation exactly.
    Anchor,
    /// Published entries known to be unreliable; mismatches are findings.
    Finding,
    /// Internal agreement between code paths; a mismatch is a defect.
    Consistency,
    /// Algebraic identity; a mismatch is a defect.
    Identity,
    Skipped,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Anchor => "anchor",
            CheckKind::Finding => "finding",
            CheckKind::Consistency => "consistency",
            CheckKind::Identity => "identity",
            CheckKind::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub algorithm: String,
    pub check: String,
    pub kind: CheckKind,
    pub sample: String,
    pub entry: String,
    pub printed: String,
    pub derived: String,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    /// True when every anchor, consistency and identity row passes.
    /// Findings do not affect the verdict.
    pub fn is_consistent(&self) -> bool {
        self.defects().next().is_none()
    }

    pub fn defects(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| {
            r.status == RowStatus::Mismatch
                && matches!(r.kind, CheckKind::Anchor | CheckKind::Consistency | CheckKind::Identity)
        })
    }

    pub fn findings(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows
            .iter()
            .filter(|r| r.status == RowStatus::Mismatch && r.kind == CheckKind::Finding)
    }

    pub fn count(&self, status: RowStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub const CSV_HEADER: &'static str = "algorithm,check,kind,sample,entry,printed,derived,status";

    /// Machine-readable rows (no header).
    pub fn csv_lines(&self) -> impl Iterator<Item = String> + '_ {
        self.rows.iter().map(|r| {
            [
                r.algorithm.as_str(),
                r.check.as_str(),
                r.kind.label(),
                r.sample.as_str(),
                r.entry.as_str(),
                r.printed.as_str(),
                r.derived.as_str(),
                r.status.label(),
            ]
            .iter()
            .map(|f| csv_field(f))
            .collect::<Vec<_>>()
            .join(",")
        })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            write!(f, "{:<8} {:<13} {:<26} {:<11}", r.status.label(), r.algorithm, r.check, r.kind.label())?;
            if !r.sample.is_empty() {
                write!(f, " [{}]", r.sample)?;
            }
            if !r.entry.is_empty() {
                write!(f, " {}", r.entry)?;
            }
            if r.status == RowStatus::Mismatch {
                write!(f, ": printed {} vs derived {}", r.printed, r.derived)?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "{} pass, {} mismatch ({} findings, {} defects), {} skipped",
            self.count(RowStatus::Pass),
            self.count(RowStatus::Mismatch),
            self.findings().count(),
            self.defects().count(),
            self.count(RowStatus::Skipped)
        )
    }
}

/// Rational sample points: a unit system, two lightly damped systems, and
/// two conservative ones for the `c = 0` tables.
pub fn default_validation_grid() -> Vec<Coefficients<Rational>> {
    let k = |m: (i64, i64), c: (i64, i64), a: (i64, i64), h: (i64, i64)| Coefficients {
        m: rat(m.0, m.1),
        c: rat(c.0, c.1),
        a: rat(a.0, a.1),
        h: rat(h.0, h.1),
    };
    alloc::vec![
        k((1, 1), (0, 1), (1, 1), (1, 1)),
        k((1, 1), (0, 1), (1, 40), (1, 10)),
        k((2, 1), (3, 10), (1, 3), (1, 2)),
        k((1, 2), (1, 5), (3, 100), (1, 50)),
        k((3, 1), (0, 1), (1, 7), (2, 1)),
    ]
}

fn sample_label(k: &Coefficients<Rational>) -> String {
    format!("m={} c={} a={} h={}", k.m, k.c, k.a, k.h)
}

struct Builder<'a> {
    rows: &'a mut Vec<ValidationRow>,
    alg: String,
    sample: String,
}

impl Builder<'_> {
    fn push(&mut self, check: &str, kind: CheckKind, entry: String, printed: String, derived: String, ok: bool) {
        self.rows.push(ValidationRow {
            algorithm: self.alg.clone(),
            check: check.to_string(),
            kind,
            sample: self.sample.clone(),
            entry,
            printed,
            derived,
            status: if ok { RowStatus::Pass } else { RowStatus::Mismatch },
        });
    }

    /// One row per differing entry, or a single PASS row.
    fn compare(&mut self, check: &str, kind: CheckKind, pairs: &[(&str, &Mat<Rational>, &Mat<Rational>)]) {
        let mut any = false;
        for (name, lhs, rhs) in pairs {
            for i in 0..lhs.rows() {
                for j in 0..lhs.cols() {
                    if lhs[(i, j)] != rhs[(i, j)] {
                        any = true;
                        self.push(
                            check,
                            kind,
                            format!("{name}[{i}][{j}]"),
                            lhs[(i, j)].to_string(),
                            rhs[(i, j)].to_string(),
                            false,
                        );
                    }
                }
            }
        }
        if !any {
            self.push(check, kind, "all entries".into(), String::new(), String::new(), true);
        }
    }
}

fn triple(s: &StepSystem<Rational>) -> [(&'static str, &Mat<Rational>); 3] {
    [("A1", &s.a1), ("A0", &s.a0), ("B", &s.b)]
}

fn zip_pairs<'a>(
    lhs: &'a StepSystem<Rational>,
    rhs: &'a StepSystem<Rational>,
) -> [(&'static str, &'a Mat<Rational>, &'a Mat<Rational>); 3] {
    let l = triple(lhs);
    let r = triple(rhs);
    [(l[0].0, l[0].1, r[0].1), (l[1].0, l[1].1, r[1].1), (l[2].0, l[2].1, r[2].1)]
}

fn listed(alg: AlgorithmId, entry: &str, table: bool) -> bool {
    let list: &[_] = if table { &TABLE_ERRATA } else { &ERRATA };
    list.iter().any(|e| {
        let name = match (table, e.matrix) {
            (true, MatrixName::A1) => "L",
            (true, MatrixName::A0) => "R",
            _ => e.matrix.label(),
        };
        e.alg == alg && format!("{name}[{}][{}]", e.row, e.col) == entry
    })
}

/// Compares the published matrices with the derivation oracles over `grid`.
pub fn validate_printed_matrices(grid: &[Coefficients<Rational>]) -> ValidationReport {
    let mut rows = Vec::new();
    for k in grid {
        let sample = sample_label(k);
        {
            let consts = k.constants();
            let residual = consts.reversal_identity_residual(&k.h);
            let mut b = Builder {
                rows: &mut rows,
                alg: "-".into(),
                sample: sample.clone(),
            };
            b.push(
                "reversal constant identity",
                CheckKind::Identity,
                "-Y+4X = Y-6h^2".into(),
                (-consts.y.clone() + Rational::from_i64(4) * consts.x.clone()).to_string(),
                (consts.y.clone() - Rational::from_i64(6) * k.h.clone() * k.h.clone()).to_string(),
                residual.is_zero(),
            );
        }
        for alg in AlgorithmId::TFEM {
            let mut b = Builder {
                rows: &mut rows,
                alg: alg.name().into(),
                sample: sample.clone(),
            };
            let derived = match derive_matrices_exact(alg, k) {
                Ok(d) => d,
                Err(e) => {
                    b.push("derivation", CheckKind::Consistency, String::new(), String::new(), e.to_string(), false);
                    continue;
                }
            };
            let pub_sys = printed(alg, k).expect("finite element algorithm");
            let fixed = corrected(alg, k).expect("finite element algorithm");
            let anchor = matches!(alg, AlgorithmId::EhpJquad | AlgorithmId::McapJquad);
            let kind = if anchor { CheckKind::Anchor } else { CheckKind::Finding };
            b.compare("published vs derived", kind, &zip_pairs(&pub_sys, &derived.system));

            // Every finding must be a documented erratum.
            for (name, lhs, rhs) in zip_pairs(&pub_sys, &derived.system) {
                for i in 0..lhs.rows() {
                    for j in 0..lhs.cols() {
                        let entry = format!("{name}[{i}][{j}]");
                        let differs = lhs[(i, j)] != rhs[(i, j)];
                        if differs && !listed(alg, &entry, false) {
                            b.push("undocumented erratum", CheckKind::Consistency, entry, lhs[(i, j)].to_string(), rhs[(i, j)].to_string(), false);
                        }
                    }
                }
            }

            let maps = |s: &StepSystem<Rational>| (s.amplification(), s.load_map());
            match (maps(&pub_sys), maps(&derived.system)) {
                ((Some(pa), Some(pg)), (Some(da), Some(dg))) => {
                    b.compare("maps A1^-1 A0 and A1^-1 B", kind, &[("AD", &pa, &da), ("G", &pg, &dg)]);
                }
                _ => b.push("maps A1^-1 A0 and A1^-1 B", kind, String::new(), "singular".into(), "singular".into(), false),
            }
            b.compare("corrected vs derived", CheckKind::Consistency, &zip_pairs(&fixed, &derived.system));
            if let Some(sum) = &derived.j_row_sum {
                let zero = sum.iter().all(Scalar::is_zero);
                let shown: Vec<String> = sum.iter().map(|v| v.to_string()).collect();
                b.push(
                    "condensation identity",
                    CheckKind::Identity,
                    "sum of J-test rows".into(),
                    "0".into(),
                    shown.join(" "),
                    zero,
                );
            }

            if k.c.is_zero() {
                let (left, right) = conservative_table(alg, &k.m, &k.a, &k.h).expect("finite element algorithm");
                let table_kind = if matches!(alg, AlgorithmId::EhpUquad | AlgorithmId::EhpUJquad) {
                    CheckKind::Finding
                } else {
                    CheckKind::Anchor
                };
                b.compare(
                    "conservative table",
                    table_kind,
                    &[("L", &left, &derived.system.a1), ("R", &right, &derived.system.a0)],
                );
                for (name, lhs, rhs) in [("L", &left, &derived.system.a1), ("R", &right, &derived.system.a0)] {
                    for i in 0..lhs.rows() {
                        for j in 0..lhs.cols() {
                            let entry = format!("{name}[{i}][{j}]");
                            if lhs[(i, j)] != rhs[(i, j)] && !listed(alg, &entry, true) {
                                b.push("undocumented erratum", CheckKind::Consistency, entry, lhs[(i, j)].to_string(), rhs[(i, j)].to_string(), false);
                            }
                        }
                    }
                }
            }
        }
    }
    for alg in [AlgorithmId::NewmarkCAA, AlgorithmId::NewmarkLinear] {
        rows.push(ValidationRow {
            algorithm: alg.name().into(),
            check: "no closed-form derivation".into(),
            kind: CheckKind::Skipped,
            sample: String::new(),
            entry: String::new(),
            printed: String::new(),
            derived: String::new(),
            status: RowStatus::Skipped,
        });
    }
    ValidationReport { rows }
}
