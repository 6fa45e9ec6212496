//! Closed-form condensed step matrices as published, entry for entry, and the
//! corrections established by re-deriving them from the weak forms.
//!
//! [`printed`] is a verbatim transcription (regression anchor for the
//! validation report); [`corrected`] patches the entries listed in
//! [`ERRATA`] and is what the integrators use.

use alloc::vec;

use crate::elements::{AlgorithmId, Coefficients, StepSystem};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Which matrix of a step system an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixName {
    A1,
    A0,
    B,
}

impl MatrixName {
    pub fn label(self) -> &'static str {
        match self {
            MatrixName::A1 => "A1",
            MatrixName::A0 => "A0",
            MatrixName::B => "B",
        }
    }
}

/// A published entry that disagrees with the weak-form derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Erratum {
    pub alg: AlgorithmId,
    pub matrix: MatrixName,
    pub row: usize,
    pub col: usize,
    pub printed: &'static str,
    pub derived: &'static str,
}

const fn erratum(
    alg: AlgorithmId,
    matrix: MatrixName,
    row: usize,
    col: usize,
    printed: &'static str,
    derived: &'static str,
) -> Erratum {
    Erratum {
        alg,
        matrix,
        row,
        col,
        printed,
        derived,
    }
}

/// Entries of the damped step matrices replaced in [`corrected`].
pub const ERRATA: [Erratum; 6] = [
    erratum(AlgorithmId::EhpUquad, MatrixName::A1, 1, 1, "-m", "1"),
    erratum(AlgorithmId::EhpUquad, MatrixName::A0, 0, 1, "-m", "1"),
    erratum(AlgorithmId::EhpUquad, MatrixName::B, 2, 1, "h/6", "h/3"),
    erratum(AlgorithmId::EhpUJquad, MatrixName::B, 2, 1, "h/6", "h/3"),
    erratum(AlgorithmId::McapUquad, MatrixName::A1, 0, 0, "(3m+ch)/(3h)", "-(3m+ch)/(3h)"),
    erratum(AlgorithmId::McapUquad, MatrixName::A0, 0, 0, "(9m+2ch)/(3h)", "(9m-ch)/(3h)"),
];

/// Entries of the conservative-case tables (`c = 0`) that disagree with the
/// derivation. Indices refer to (left, right) = (A1, A0).
pub const TABLE_ERRATA: [Erratum; 3] = [
    erratum(AlgorithmId::EhpUquad, MatrixName::A1, 1, 1, "-m", "1"),
    erratum(AlgorithmId::EhpUquad, MatrixName::A0, 0, 1, "-m", "1"),
    erratum(AlgorithmId::EhpUJquad, MatrixName::A1, 0, 0, "(12ma+h^2)/(12ha)", "-(12ma+h^2)/(12ha)"),
];

/// Errata affecting `alg`.
pub fn errata_for(alg: AlgorithmId) -> impl Iterator<Item = &'static Erratum> {
    ERRATA.iter().filter(move |e| e.alg == alg)
}

/// Shorthand products shared by the transcriptions.
struct Terms<T> {
    m: T,
    c: T,
    a: T,
    h: T,
    h2: T,
    x: T,
    y: T,
    cha6: T,
    ha12: T,
}

impl<T: Scalar> Terms<T> {
    fn new(k: &Coefficients<T>) -> Self {
        let consts = k.constants();
        let h2 = k.h.clone() * k.h.clone();
        Terms {
            m: k.m.clone(),
            c: k.c.clone(),
            a: k.a.clone(),
            h: k.h.clone(),
            cha6: n::<T>(6) * k.c.clone() * k.h.clone() * k.a.clone(),
            ha12: n::<T>(12) * k.h.clone() * k.a.clone(),
            h2,
            x: consts.x,
            y: consts.y,
        }
    }

    fn ch(&self) -> T {
        self.c.clone() * self.h.clone()
    }

    fn ma(&self) -> T {
        self.m.clone() * self.a.clone()
    }

    fn cha(&self) -> T {
        self.c.clone() * self.h.clone() * self.a.clone()
    }
}

fn n<T: Scalar>(k: i64) -> T {
    T::from_i64(k)
}

fn q<T: Scalar>(num: i64, den: i64) -> T {
    T::ratio(num, den)
}

/// Verbatim transcription of the published damped step matrices.
pub fn printed<T: Scalar>(alg: AlgorithmId, k: &Coefficients<T>) -> Option<StepSystem<T>> {
    let t = Terms::new(k);
    let (a1, a0, b) = match alg {
        AlgorithmId::EhpJquad => ehp_jquad(&t),
        AlgorithmId::EhpUquad => ehp_uquad(&t),
        AlgorithmId::EhpUJquad => ehp_ujquad(&t),
        AlgorithmId::McapJquad => mcap_jquad(&t),
        AlgorithmId::McapUquad => mcap_uquad(&t),
        AlgorithmId::McapUJquad => mcap_ujquad(&t),
        _ => return None,
    };
    Some(StepSystem { alg, a1, a0, b })
}

/// Published matrices with [`ERRATA`] applied.
pub fn corrected<T: Scalar>(alg: AlgorithmId, k: &Coefficients<T>) -> Option<StepSystem<T>> {
    let mut sys = printed(alg, k)?;
    let t = Terms::new(k);
    match alg {
        AlgorithmId::EhpUquad => {
            sys.a1[(1, 1)] = T::one();
            sys.a0[(0, 1)] = T::one();
            sys.b[(2, 1)] = t.h.clone() / n(3);
        }
        AlgorithmId::EhpUJquad => {
            sys.b[(2, 1)] = t.h.clone() / n(3);
        }
        AlgorithmId::McapUquad => {
            let h3 = n::<T>(3) * t.h.clone();
            sys.a1[(0, 0)] = -(n::<T>(3) * t.m.clone() + t.ch()) / h3.clone();
            sys.a0[(0, 0)] = (n::<T>(9) * t.m.clone() - t.ch()) / h3;
        }
        _ => {}
    }
    Some(sys)
}

type Triple<T> = (Mat<T>, Mat<T>, Mat<T>);

fn ehp_jquad<T: Scalar>(t: &Terms<T>) -> Triple<T> {
    let diag = (t.x.clone() + t.cha6.clone()) / t.ha12.clone();
    let off = (-t.x.clone() + t.cha6.clone()) / t.ha12.clone();
    let jj = -(n::<T>(2) * t.a.clone()) / t.h.clone();
    let a1 = Mat::from_rows(vec![
        vec![diag.clone(), T::zero(), q(1, 2)],
        vec![off.clone(), T::one(), q(1, 2)],
        vec![T::one(), T::zero(), jj.clone()],
    ]);
    let a0 = Mat::from_rows(vec![
        vec![diag, T::one(), q(1, 2)],
        vec![off, T::zero(), q(1, 2)],
        vec![-T::one(), T::zero(), jj],
    ]);
    let b = Mat::from_rows(vec![
        vec![t.h.clone() / n(3), t.h.clone() / n(6), T::zero()],
        vec![t.h.clone() / n(6), t.h.clone() / n(3), T::zero()],
        vec![T::zero(), T::zero(), T::zero()],
    ]);
    (a1, a0, b)
}

/// Third row and `J` column shared by both u-quadratic EHP schemes.
struct EhpUqShared<T> {
    j_top: T,
    j_mid: T,
    row3_start: T,
    row3_end: T,
    jj: T,
    b: Mat<T>,
}

fn ehp_uq_shared<T: Scalar>(t: &Terms<T>) -> EhpUqShared<T> {
    let h2_6 = n::<T>(6) * t.h2.clone();
    let h3 = n::<T>(3) * t.h.clone();
    EhpUqShared {
        j_top: (t.y.clone() + t.cha6.clone()) / h2_6.clone(),
        j_mid: -(-t.y.clone() + t.cha6.clone()) / h2_6,
        row3_end: n::<T>(2) * (n::<T>(6) * t.m.clone() + t.ch()) / h3.clone(),
        row3_start: n::<T>(2) * (n::<T>(-6) * t.m.clone() + t.ch()) / h3,
        jj: -(n::<T>(2) * t.x.clone()) / (n::<T>(3) * t.h2.clone()),
        b: Mat::from_rows(vec![
            vec![t.h.clone() / n(6), T::zero(), T::zero()],
            vec![T::zero(), t.h.clone() / n(6), T::zero()],
            vec![t.h.clone() / n(3), t.h.clone() / n(6), T::zero()],
        ]),
    }
}

fn ehp_uquad<T: Scalar>(t: &Terms<T>) -> Triple<T> {
    let s = ehp_uq_shared(t);
    let h3 = n::<T>(3) * t.h.clone();
    let m = t.m.clone();
    let a1 = Mat::from_rows(vec![
        vec![-(n::<T>(3) * m.clone() + t.ch()) / h3.clone(), T::zero(), s.j_top.clone()],
        vec![(n::<T>(-9) * m.clone() + n::<T>(2) * t.ch()) / h3.clone(), -m.clone(), s.j_mid.clone()],
        vec![s.row3_end, T::zero(), s.jj.clone()],
    ]);
    let a0 = Mat::from_rows(vec![
        vec![(n::<T>(9) * m.clone() + n::<T>(2) * t.ch()) / h3.clone(), -m.clone(), s.j_top],
        vec![-(n::<T>(-3) * m + t.ch()) / h3, T::zero(), s.j_mid],
        vec![s.row3_start, T::zero(), s.jj],
    ]);
    (a1, a0, s.b)
}

fn ehp_ujquad<T: Scalar>(t: &Terms<T>) -> Triple<T> {
    let s = ehp_uq_shared(t);
    let ma = t.ma();
    let cha = t.cha();
    let h2 = t.h2.clone();
    let j_mid = (t.y.clone() - t.cha6.clone()) / (n::<T>(6) * h2.clone());
    let a1 = Mat::from_rows(vec![
        vec![
            -(n::<T>(12) * ma.clone() + n::<T>(4) * cha.clone() + h2.clone()) / t.ha12.clone(),
            T::zero(),
            s.j_top.clone(),
        ],
        vec![
            (n::<T>(-36) * ma.clone() + n::<T>(8) * cha.clone() + h2.clone()) / t.ha12.clone(),
            T::one(),
            j_mid.clone(),
        ],
        vec![s.row3_end, T::zero(), s.jj.clone()],
    ]);
    let a0 = Mat::from_rows(vec![
        vec![
            (n::<T>(36) * ma.clone() + n::<T>(8) * cha.clone() - h2.clone()) / t.ha12.clone(),
            T::one(),
            s.j_top,
        ],
        vec![
            -(n::<T>(-12) * ma + n::<T>(4) * cha - h2) / t.ha12.clone(),
            T::zero(),
            j_mid,
        ],
        vec![s.row3_start, T::zero(), s.jj],
    ]);
    (a1, a0, s.b)
}

fn mcap_jquad<T: Scalar>(t: &Terms<T>) -> Triple<T> {
    let jj = -t.a.clone() / t.h.clone();
    let a1 = Mat::from_rows(vec![
        vec![(t.x.clone() + t.cha6.clone()) / t.ha12.clone(), q(1, 2)],
        vec![q(1, 2), jj.clone()],
    ]);
    let a0 = Mat::from_rows(vec![
        vec![(t.x.clone() - t.cha6.clone()) / t.ha12.clone(), q(-1, 2)],
        vec![q(-1, 2), jj],
    ]);
    let b = Mat::from_rows(vec![
        vec![t.h.clone() / n(3), t.h.clone() / n(6), T::one()],
        vec![T::zero(), T::zero(), T::zero()],
    ]);
    (a1, a0, b)
}

fn mcap_uquad<T: Scalar>(t: &Terms<T>) -> Triple<T> {
    let h3 = n::<T>(3) * t.h.clone();
    let h2_6 = n::<T>(6) * t.h2.clone();
    let jj = -(n::<T>(2) * t.x.clone()) / (n::<T>(3) * t.h2.clone());
    let m = t.m.clone();
    let a1 = Mat::from_rows(vec![
        vec![
            (n::<T>(3) * m.clone() + t.ch()) / h3.clone(),
            (t.y.clone() + t.cha6.clone()) / h2_6.clone(),
        ],
        vec![n::<T>(2) * (n::<T>(6) * m.clone() + t.ch()) / h3.clone(), jj.clone()],
    ]);
    let a0 = Mat::from_rows(vec![
        vec![
            (n::<T>(9) * m.clone() + n::<T>(2) * t.ch()) / h3.clone(),
            (t.y.clone() - n::<T>(6) * t.h2.clone() + t.cha6.clone()) / h2_6,
        ],
        vec![n::<T>(2) * (n::<T>(-6) * m + t.ch()) / h3, jj],
    ]);
    let b = Mat::from_rows(vec![
        vec![t.h.clone() / n(6), T::zero(), T::one()],
        vec![t.h.clone() / n(3), t.h.clone() / n(3), T::zero()],
    ]);
    (a1, a0, b)
}

fn mcap_ujquad<T: Scalar>(t: &Terms<T>) -> Triple<T> {
    let m = t.m.clone();
    let ham12 = t.ha12.clone() * m.clone();
    let m12 = n::<T>(12) * m.clone();
    let mx = m.clone() * t.x.clone();
    let damp = t.cha6.clone() * m.clone();
    let c2h2a = t.c.clone() * t.c.clone() * t.h2.clone() * t.a.clone();
    let off_end = (n::<T>(6) * m.clone() + t.ch()) / m12.clone();
    let off_start = (n::<T>(-6) * m.clone() + t.ch()) / m12.clone();
    let jj = -t.x.clone() / (n::<T>(12) * t.h.clone() * m.clone());
    let a1 = Mat::from_rows(vec![
        vec![(mx.clone() + damp.clone() + c2h2a.clone()) / ham12.clone(), off_end.clone()],
        vec![off_end, jj.clone()],
    ]);
    let a0 = Mat::from_rows(vec![
        vec![(mx - damp + c2h2a) / ham12, off_start.clone()],
        vec![off_start, jj],
    ]);
    let ch2 = t.c.clone() * t.h2.clone() / (n::<T>(24) * m.clone());
    let h2m = t.h2.clone() / (n::<T>(24) * m);
    let b = Mat::from_rows(vec![
        vec![t.h.clone() / n(3) + ch2.clone(), t.h.clone() / n(6) + ch2, T::one()],
        vec![h2m.clone(), h2m, T::zero()],
    ]);
    (a1, a0, b)
}

/// Verbatim transcription of the conservative-case (`c = 0`) tables:
/// `(A_left, A_right)`.
pub fn conservative_table<T: Scalar>(alg: AlgorithmId, m: &T, a: &T, h: &T) -> Option<(Mat<T>, Mat<T>)> {
    let k = Coefficients {
        m: m.clone(),
        c: T::zero(),
        a: a.clone(),
        h: h.clone(),
    };
    let t = Terms::new(&k);
    let m = t.m.clone();
    let h2_6 = n::<T>(6) * t.h2.clone();
    let x12ha = t.x.clone() / t.ha12.clone();
    let y6 = t.y.clone() / h2_6.clone();
    let jj_u = -(n::<T>(2) * t.x.clone()) / (n::<T>(3) * t.h2.clone());
    let m_h = |k: i64| n::<T>(k) * m.clone() / t.h.clone();
    let half = q::<T>(1, 2);
    let mhalf = q::<T>(-1, 2);
    Some(match alg {
        AlgorithmId::EhpJquad => {
            let jj = -(n::<T>(2) * t.a.clone()) / t.h.clone();
            (
                Mat::from_rows(vec![
                    vec![x12ha.clone(), T::zero(), half.clone()],
                    vec![-x12ha.clone(), T::one(), half.clone()],
                    vec![T::one(), T::zero(), jj.clone()],
                ]),
                Mat::from_rows(vec![
                    vec![x12ha.clone(), T::one(), half.clone()],
                    vec![-x12ha, T::zero(), half],
                    vec![-T::one(), T::zero(), jj],
                ]),
            )
        }
        AlgorithmId::EhpUquad => (
            Mat::from_rows(vec![
                vec![m_h(-1), T::zero(), y6.clone()],
                vec![m_h(-3), -m.clone(), y6.clone()],
                vec![m_h(4), T::zero(), jj_u.clone()],
            ]),
            Mat::from_rows(vec![
                vec![m_h(3), -m.clone(), y6.clone()],
                vec![m_h(1), T::zero(), y6],
                vec![m_h(-4), T::zero(), jj_u],
            ]),
        ),
        AlgorithmId::EhpUJquad => {
            let ma = t.ma();
            let h2 = t.h2.clone();
            let p = (n::<T>(12) * ma.clone() + h2.clone()) / t.ha12.clone();
            (
                Mat::from_rows(vec![
                    vec![p.clone(), T::zero(), y6.clone()],
                    vec![(n::<T>(-36) * ma.clone() + h2.clone()) / t.ha12.clone(), T::one(), y6.clone()],
                    vec![m_h(4), T::zero(), jj_u.clone()],
                ]),
                Mat::from_rows(vec![
                    vec![(n::<T>(36) * ma - h2) / t.ha12.clone(), T::one(), y6.clone()],
                    vec![p, T::zero(), y6],
                    vec![m_h(-4), T::zero(), jj_u],
                ]),
            )
        }
        AlgorithmId::McapJquad => {
            let jj = -t.a.clone() / t.h.clone();
            (
                Mat::from_rows(vec![vec![x12ha.clone(), half.clone()], vec![half, jj.clone()]]),
                Mat::from_rows(vec![vec![x12ha, mhalf.clone()], vec![mhalf, jj]]),
            )
        }
        AlgorithmId::McapUquad => (
            Mat::from_rows(vec![vec![m_h(-1), y6], vec![m_h(4), jj_u.clone()]]),
            Mat::from_rows(vec![
                vec![m_h(3), (t.y.clone() - n::<T>(6) * t.h2.clone()) / h2_6],
                vec![m_h(-4), jj_u],
            ]),
        ),
        AlgorithmId::McapUJquad => {
            let jj = -t.x.clone() / (n::<T>(12) * t.h.clone() * m);
            (
                Mat::from_rows(vec![vec![x12ha.clone(), half.clone()], vec![half, jj.clone()]]),
                Mat::from_rows(vec![vec![x12ha, mhalf.clone()], vec![mhalf, jj]]),
            )
        }
        _ => return None,
    })
}
