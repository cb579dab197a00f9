//! Cocycles `A : X → SL(2,R)` over a subshift of finite type and their
//! products along orbits.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gallery::{self, CounterexampleParams};
use crate::matrix::Mat2;
use crate::symbolic::{Symbol, SymbolSequence, TransitionMatrix};

/// Largest table a locally constant cocycle may allocate.
const MAX_TABLE_SIZE: usize = 1 << 24;

/// A cocycle that reads `x` on a fixed coordinate window.
#[derive(Clone, Debug, PartialEq)]
pub struct LocallyConstant {
    window_lo: i64,
    window_hi: i64,
    table: Vec<Option<Mat2>>,
}

impl LocallyConstant {
    pub fn window(&self) -> (i64, i64) {
        (self.window_lo, self.window_hi)
    }

    pub fn width(&self) -> usize {
        (self.window_hi - self.window_lo + 1) as usize
    }
}

/// Named cocycles that are not given by a finite table.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    /// `diag(2, 1/2) · R_θ(x)` on the full 2-shift, with a rotation that
    /// switches on near the homoclinic point `q`.
    DiagRotation(CounterexampleParams),
}

impl Builtin {
    pub const DIAG_ROTATION: &'static str = "diag-rotation";

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::DiagRotation(_) => Self::DIAG_ROTATION,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CocycleKind {
    LocallyConstant(LocallyConstant),
    Builtin(Builtin),
}

/// A cocycle together with its base shift and declared Hölder exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleSpec {
    sft: TransitionMatrix,
    kind: CocycleKind,
    alpha: f64,
}

/// `A^n(x)` stored as `e^{log_scale} · matrix` with `|matrix| = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductResult {
    pub matrix: Mat2,
    pub log_scale: f64,
    /// Signed step count: positive for `A^n`, negative for `A^{-n}`.
    pub steps: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BunchingReport {
    pub bunched: bool,
    /// `sup_x |A(x)| |A(x)^{-1}| 2^{-α}`.
    pub margin: f64,
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub constant: f64,
}

impl ProductResult {
    pub fn identity() -> Self {
        ProductResult {
            matrix: Mat2::IDENTITY,
            log_scale: 0.0,
            steps: 0,
        }
    }

    pub fn from_matrix(m: Mat2) -> Self {
        let mut p = ProductResult {
            matrix: m,
            log_scale: 0.0,
            steps: 0,
        };
        p.renormalize();
        p
    }

    fn renormalize(&mut self) {
        let s = self.matrix.norm();
        if s > 0.0 && s.is_finite() {
            self.matrix = self.matrix.scale(1.0 / s);
            self.log_scale += s.ln();
        }
    }

    /// Replaces the product `P` by `m · P`.
    pub fn push_left(&mut self, m: &Mat2) {
        self.matrix = *m * self.matrix;
        self.renormalize();
    }

    /// `later · earlier`.
    pub fn compose(later: &ProductResult, earlier: &ProductResult) -> ProductResult {
        let mut p = ProductResult {
            matrix: later.matrix * earlier.matrix,
            log_scale: later.log_scale + earlier.log_scale,
            steps: later.steps + earlier.steps,
        };
        p.renormalize();
        p
    }

    /// Inverse of a determinant-one product. Uses the adjugate, since the
    /// determinant of the normalized matrix underflows for long products.
    pub fn inverse(&self) -> Result<ProductResult> {
        if !self.matrix.is_finite() {
            return Err(Error::DegenerateMatrix(f64::NAN));
        }
        let mut p = ProductResult {
            matrix: self.matrix.adjugate(),
            log_scale: self.log_scale,
            steps: -self.steps,
        };
        p.renormalize();
        Ok(p)
    }

    /// `log |A^n(x)|`.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + self.matrix.norm().ln()
    }

    /// The true product `e^{log_scale} · matrix`; may overflow for long products.
    pub fn recombined(&self) -> Mat2 {
        self.matrix.scale(self.log_scale.exp())
    }
}

impl CocycleSpec {
    /// A locally constant cocycle reading `x_{w_lo..=w_hi}`; `entries` must
    /// list exactly the admissible words of that length.
    pub fn locally_constant(
        sft: TransitionMatrix,
        window: (i64, i64),
        entries: impl IntoIterator<Item = (Vec<Symbol>, Mat2)>,
        alpha: f64,
    ) -> Result<Self> {
        let (lo, hi) = window;
        if lo > 0 || hi < 0 {
            return Err(Error::InvalidSpec(format!(
                "window [{lo}, {hi}] must contain 0"
            )));
        }
        check_alpha(alpha)?;
        let width = (hi - lo + 1) as u32;
        let size = sft
            .size()
            .checked_pow(width)
            .filter(|&s| s <= MAX_TABLE_SIZE)
            .ok_or_else(|| Error::InvalidSpec("cocycle table too large".into()))?;
        let mut table = vec![None; size];
        for (word, m) in entries {
            if word.len() != width as usize {
                return Err(Error::InvalidSpec(format!(
                    "word {word:?} has length {}, window needs {width}",
                    word.len()
                )));
            }
            if !sft.admits_word(&word) {
                return Err(Error::InvalidSpec(format!(
                    "word {word:?} is not admissible"
                )));
            }
            m.require_sl2()?;
            let idx = encode(&word, sft.size());
            if table[idx].replace(m).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate entry for {word:?}")));
            }
        }
        if let Some(missing) = sft
            .admissible_words(width as usize)
            .into_iter()
            .find(|w| table[encode(w, sft.size())].is_none())
        {
            return Err(Error::InvalidSpec(format!(
                "no matrix for admissible word {missing:?}"
            )));
        }
        Ok(CocycleSpec {
            sft,
            kind: CocycleKind::LocallyConstant(LocallyConstant {
                window_lo: lo,
                window_hi: hi,
                table,
            }),
            alpha,
        })
    }

    /// `A(x) = matrices[x_0]`.
    pub fn one_step(sft: TransitionMatrix, matrices: &[Mat2], alpha: f64) -> Result<Self> {
        if matrices.len() != sft.size() {
            return Err(Error::InvalidSpec(format!(
                "{} matrices for an alphabet of size {}",
                matrices.len(),
                sft.size()
            )));
        }
        let entries = matrices.iter().enumerate().map(|(s, m)| (vec![s], *m));
        Self::locally_constant(sft, (0, 0), entries, alpha)
    }

    /// `A ≡ m` over the given shift.
    pub fn constant(sft: TransitionMatrix, m: Mat2, alpha: f64) -> Result<Self> {
        let n = sft.size();
        Self::one_step(sft, &vec![m; n], alpha)
    }

    /// The rotation-near-`q` cocycle on the full 2-shift, declared 1/8-Hölder.
    pub fn diag_rotation(params: CounterexampleParams) -> Self {
        CocycleSpec {
            sft: TransitionMatrix::full_shift(2),
            kind: CocycleKind::Builtin(Builtin::DiagRotation(params)),
            alpha: gallery::HOLDER_EXPONENT,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        self.alpha = alpha;
        Ok(self)
    }

    pub fn sft(&self) -> &TransitionMatrix {
        &self.sft
    }

    pub fn kind(&self) -> &CocycleKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Coordinate window for locally constant cocycles.
    pub fn window(&self) -> Option<(i64, i64)> {
        match &self.kind {
            CocycleKind::LocallyConstant(lc) => Some(lc.window()),
            CocycleKind::Builtin(_) => None,
        }
    }

    pub fn is_one_step(&self) -> bool {
        self.window() == Some((0, 0))
    }

    /// Table entries in lexicographic word order.
    pub fn entries(&self) -> Vec<(Vec<Symbol>, Mat2)> {
        match &self.kind {
            CocycleKind::LocallyConstant(lc) => self
                .sft
                .admissible_words(lc.width())
                .into_iter()
                .map(|w| {
                    let m = lc.table[encode(&w, self.sft.size())].expect("table is total");
                    (w, m)
                })
                .collect(),
            CocycleKind::Builtin(_) => Vec::new(),
        }
    }

    pub fn counterexample_params(&self) -> Option<&CounterexampleParams> {
        match &self.kind {
            CocycleKind::Builtin(Builtin::DiagRotation(p)) => Some(p),
            _ => None,
        }
    }

    /// `A(x)`.
    pub fn evaluate(&self, x: &SymbolSequence) -> Result<Mat2> {
        self.evaluate_at(x, 0)
    }

    /// `A(T^k x)`, read directly from `x` without shifting it.
    #[inline]
    pub fn evaluate_at(&self, x: &SymbolSequence, k: i64) -> Result<Mat2> {
        match &self.kind {
            CocycleKind::LocallyConstant(lc) => {
                let l = self.sft.size();
                let mut idx = 0usize;
                for j in lc.window_lo..=lc.window_hi {
                    let s = x.get(k + j);
                    if s >= l {
                        return Err(Error::SymbolOutOfRange { symbol: s, size: l });
                    }
                    idx = idx * l + s;
                }
                lc.table[idx].ok_or_else(|| {
                    Error::WordNotInTable(x.window(k + lc.window_lo, k + lc.window_hi + 1))
                })
            }
            CocycleKind::Builtin(Builtin::DiagRotation(p)) => Ok(gallery::matrix_at(x, k, p)),
        }
    }

    /// `A^n(x)` for `n >= 0` and `A^{-|n|}(x)` for `n < 0`.
    pub fn product(&self, x: &SymbolSequence, n: i64) -> Result<ProductResult> {
        self.product_from(x, 0, n)
    }

    /// `A^n(T^k x)`.
    pub fn product_from(&self, x: &SymbolSequence, k: i64, n: i64) -> Result<ProductResult> {
        let mut p = ProductResult::identity();
        if n >= 0 {
            for j in 0..n {
                p.push_left(&self.evaluate_at(x, k + j)?);
            }
        } else {
            for j in 1..=-n {
                p.push_left(&self.evaluate_at(x, k - j)?.inverse()?);
            }
        }
        p.steps = n;
        Ok(p)
    }

    /// Fiber-bunching margin `sup |A| |A^{-1}| 2^{-α}`; bunched iff `< 1`.
    pub fn bunching(&self) -> BunchingReport {
        let nonconformality = match &self.kind {
            CocycleKind::LocallyConstant(lc) => lc
                .table
                .iter()
                .flatten()
                .map(|m| {
                    let s = m.norm();
                    s * s / m.det().abs()
                })
                .fold(0.0, f64::max),
            CocycleKind::Builtin(Builtin::DiagRotation(_)) => {
                // |D R_θ| = |D| for every θ
                let d = gallery::base_matrix();
                d.norm() * d.norm() / d.det().abs()
            }
        };
        let margin = nonconformality * (-self.alpha).exp2();
        BunchingReport {
            bunched: margin < 1.0,
            margin,
            alpha: self.alpha,
        }
    }

    /// Hölder constant of `A` for the declared exponent.
    ///
    /// For a locally constant cocycle this is exact: two points at distance
    /// `2^{-N}` share the window unless the window words differ at some
    /// `|n| = N`, so the supremum is a finite maximum over word pairs.
    pub fn holder_estimate(&self) -> HolderEstimate {
        match &self.kind {
            CocycleKind::LocallyConstant(lc) => {
                let entries = self.entries();
                let mut best: f64 = 0.0;
                for (i, (u, mu)) in entries.iter().enumerate() {
                    for (v, mv) in &entries[i + 1..] {
                        let diff = (*mu - *mv).norm();
                        if diff == 0.0 {
                            continue;
                        }
                        let radius = (lc.window_lo..=lc.window_hi)
                            .filter(|&n| u[(n - lc.window_lo) as usize] != v[(n - lc.window_lo) as usize])
                            .map(i64::abs)
                            .min()
                            .expect("distinct words differ somewhere");
                        best = best.max(diff * (self.alpha * radius as f64).exp2());
                    }
                }
                HolderEstimate {
                    alpha: self.alpha,
                    constant: best,
                }
            }
            CocycleKind::Builtin(Builtin::DiagRotation(_)) => HolderEstimate {
                alpha: gallery::HOLDER_EXPONENT,
                constant: gallery::HOLDER_CONSTANT_AT_Q,
            },
        }
    }

    /// Conjugates every table entry by `p`: `A ↦ p A p^{-1}`.
    pub fn conjugated(&self, p: &Mat2) -> Result<Self> {
        let inv = p.inverse()?;
        match &self.kind {
            CocycleKind::LocallyConstant(lc) => {
                let entries = self.entries().into_iter().map(|(w, m)| (w, *p * m * inv));
                Self::locally_constant(self.sft.clone(), lc.window(), entries, self.alpha)
            }
            CocycleKind::Builtin(_) => Err(Error::InvalidSpec(
                "conjugation needs a locally constant cocycle".into(),
            )),
        }
    }

    /// Rewrites a locally constant cocycle as a one-step cocycle over the
    /// higher block shift whose symbols are the admissible window words.
    pub fn recode_one_step(&self) -> Result<(CocycleSpec, Recoding)> {
        let CocycleKind::LocallyConstant(lc) = &self.kind else {
            return Err(Error::InvalidSpec(
                "only locally constant cocycles can be recoded".into(),
            ));
        };
        let width = lc.width();
        let entries = self.entries();
        let words: Vec<Vec<Symbol>> = entries.iter().map(|(w, _)| w.clone()).collect();
        let index: HashMap<Vec<Symbol>, Symbol> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let rows: Vec<Vec<u8>> = words
            .iter()
            .map(|u| {
                words
                    .iter()
                    .map(|v| (u[1..] == v[..width - 1]) as u8)
                    .collect()
            })
            .collect();
        let sft = TransitionMatrix::new(&rows)?;
        let mats: Vec<Mat2> = entries.iter().map(|(_, m)| *m).collect();
        let spec = CocycleSpec::one_step(sft, &mats, self.alpha)?;
        Ok((
            spec,
            Recoding {
                window_lo: lc.window_lo,
                window_hi: lc.window_hi,
                words,
                index,
            },
        ))
    }

    /// Points worth probing for slow norm growth, beyond periodic orbits.
    pub fn probe_hints(&self, n_max: usize) -> Vec<SymbolSequence> {
        match &self.kind {
            CocycleKind::Builtin(Builtin::DiagRotation(_)) => {
                (0..=(n_max / 2) as i64).map(gallery::homoclinic_preimage).collect()
            }
            CocycleKind::LocallyConstant(_) => Vec::new(),
        }
    }
}

/// Map from points of the original shift to the higher block shift.
#[derive(Clone, Debug)]
pub struct Recoding {
    window_lo: i64,
    window_hi: i64,
    words: Vec<Vec<Symbol>>,
    index: HashMap<Vec<Symbol>, Symbol>,
}

impl Recoding {
    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }

    /// `x̃_k = (x_{k+w_lo}, …, x_{k+w_hi})` as a block symbol.
    pub fn encode(&self, x: &SymbolSequence) -> Result<SymbolSequence> {
        let lp = x.left_period().len() as i64;
        let rp = x.right_period().len() as i64;
        let start = x.core_start() - self.window_hi;
        let end = x.core_end() - self.window_lo;
        let sym = |k: i64| -> Result<Symbol> {
            let w = x.window(k + self.window_lo, k + self.window_hi + 1);
            self.index
                .get(&w)
                .copied()
                .ok_or(Error::WordNotInTable(w))
        };
        let left = (start - lp..start).map(sym).collect::<Result<Vec<_>>>()?;
        let core = (start..end).map(sym).collect::<Result<Vec<_>>>()?;
        let right = (end..end + rp).map(sym).collect::<Result<Vec<_>>>()?;
        SymbolSequence::new(left, start, core, right)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("alpha = {alpha} outside (0, 1]")))
    }
}

fn encode(word: &[Symbol], l: usize) -> usize {
    word.iter().fold(0, |acc, &s| acc * l + s)
}
