//! Nonlocal box complexity: `NLBC(f) = rank_F₂(M_{f'})` and explicit
//! decompositions `f(x,y) = A(x) ⊕ B(y) ⊕ ⊕_i l_i(x) r_i(y)`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::boolfn::{is_parity_up_to_negation, TruthTable};
use crate::error::{Error, Result};
use crate::f2linalg::{read_dump, write_dump, EchelonBasis, Elimination, F2Matrix, MemoryBudget, RowSource};
use crate::twoparty::TwoPartyFunction;

/// Largest per-party width [`decompose`] accepts.
pub const MAX_DECOMPOSE_BITS: usize = 12;

#[derive(Clone, Copy, Debug)]
pub struct NlbcOptions {
    /// Cap on the resident echelon basis (or materialized matrix).
    pub budget: MemoryBudget,
    pub strategy: Elimination,
}

impl Default for NlbcOptions {
    fn default() -> Self {
        NlbcOptions { budget: MemoryBudget::default(), strategy: Elimination::Auto }
    }
}

/// Materializes `M_{f'}`; row 0 and column 0 are zero.
pub fn build_mfprime(f: &TwoPartyFunction, budget: MemoryBudget) -> Result<F2Matrix> {
    F2Matrix::from_source(&f.prime_rows()?, budget)
}

/// Row-echelon basis of the row space of `M_{f'}`, streamed row by row.
pub fn mfprime_basis(f: &TwoPartyFunction, opts: NlbcOptions) -> Result<EchelonBasis> {
    let rows = f.prime_rows()?;
    let mut basis = EchelonBasis::new(rows.cols());
    basis.absorb_source(&rows, opts.strategy, opts.budget)?;
    Ok(basis)
}

/// The nonlocal box complexity of `f`.
pub fn nlbc(f: &TwoPartyFunction, opts: NlbcOptions) -> Result<usize> {
    Ok(mfprime_basis(f, opts)?.rank())
}

/// `f(x,y) = A(x) ⊕ B(y) ⊕ ⊕_i l_i(x) r_i(y)` with independent `l_i` and independent `r_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub alice_local: TruthTable,
    pub bob_local: TruthTable,
    pub pairs: Vec<(TruthTable, TruthTable)>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn alice_bits(&self) -> usize {
        self.alice_local.n()
    }

    pub fn bob_bits(&self) -> usize {
        self.bob_local.n()
    }

    pub fn eval(&self, x: usize, y: usize) -> bool {
        self.pairs
            .iter()
            .fold(self.alice_local.get(x) ^ self.bob_local.get(y), |acc, (l, r)| acc ^ (l.get(x) & r.get(y)))
    }

    /// Exhaustively checks the reconstruction identity against `f`.
    pub fn reconstructs(&self, f: &TwoPartyFunction) -> bool {
        if f.alice_bits() != self.alice_bits() || f.bob_bits() != self.bob_bits() {
            return false;
        }
        (0..1usize << self.alice_bits())
            .all(|x| (0..1usize << self.bob_bits()).all(|y| self.eval(x, y) == f.eval_idx(x, y)))
    }

    /// True iff the `l_i` are F₂-independent and so are the `r_i`.
    pub fn is_non_redundant(&self) -> bool {
        let t = self.pairs.len();
        if t == 0 {
            return true;
        }
        let rank_of = |tables: Vec<&TruthTable>| {
            let n = tables[0].n();
            let mut basis = EchelonBasis::new(1 << n);
            for tt in tables {
                basis.add_row(tt.words());
            }
            basis.rank()
        };
        rank_of(self.pairs.iter().map(|p| &p.0).collect()) == t
            && rank_of(self.pairs.iter().map(|p| &p.1).collect()) == t
    }
}

/// Extracts a decomposition with `t = NLBC(f)` from a factorization of `M_{f'}`.
pub fn decompose(f: &TwoPartyFunction) -> Result<Decomposition> {
    let (na, nb) = (f.alice_bits(), f.bob_bits());
    if na == 0 || nb == 0 || na > MAX_DECOMPOSE_BITS || nb > MAX_DECOMPOSE_BITS {
        return Err(Error::SizeLimit(format!(
            "decompose needs 1..={MAX_DECOMPOSE_BITS} input bits per party, got {na}+{nb}"
        )));
    }
    let m = build_mfprime(f, MemoryBudget::default())?;
    let (u, v) = m.factor()?;
    let f00 = f.eval_idx(0, 0);
    let alice_local = TruthTable::from_fn(na, |x| f.eval_idx(x, 0) ^ f00)?;
    let bob_local = TruthTable::from_fn(nb, |y| f.eval_idx(0, y))?;
    let pairs = (0..u.cols())
        .map(|i| {
            let l = TruthTable::from_fn(na, |x| u.get(x, i))?;
            let r = TruthTable::from_words(nb, v.row(i).to_vec())?;
            Ok((l, r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition { alice_local, bob_local, pairs })
}

/// Outcome of checking that `NLBC(g⊕)` is never 1 and is 0 exactly for parities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityLemmaVerdict {
    pub nlbc: usize,
    pub is_parity_up_to_negation: bool,
    pub holds: bool,
}

pub fn check_lemma_nlbc1(g: &TruthTable) -> Result<ParityLemmaVerdict> {
    if g.n() > MAX_DECOMPOSE_BITS {
        return Err(Error::SizeLimit(format!("lemma check limited to n <= {MAX_DECOMPOSE_BITS}")));
    }
    let value = nlbc(&TwoPartyFunction::xor(g.clone()), NlbcOptions::default())?;
    let parity = is_parity_up_to_negation(g);
    Ok(ParityLemmaVerdict {
        nlbc: value,
        is_parity_up_to_negation: parity,
        holds: value != 1 && ((value == 0) == parity),
    })
}

/// Options for the `Maj_n` table.
#[derive(Clone, Debug, Default)]
pub struct MajTableOptions {
    /// Permit `n = 15` (a 32768-square matrix; seconds with the parallel backend).
    pub allow_15: bool,
    /// Permit `n = 17` (hours of compute, about 1 GiB basis).
    pub allow_17: bool,
    /// Directory for cached `M_{f'}` bases in the matrix dump format.
    pub cache_dir: Option<PathBuf>,
    pub strategy: Option<Elimination>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MajRow {
    pub n: usize,
    pub nlbc: usize,
}

fn cache_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("maj{n}_mfprime_basis.f2mx"))
}

/// `NLBC(Maj_n⊕)` for each odd `n` in `ns` (3 ≤ n ≤ 17).
pub fn maj_table(ns: &[usize], opts: &MajTableOptions) -> Result<Vec<MajRow>> {
    for &n in ns {
        if n % 2 == 0 || !(3..=17).contains(&n) {
            return Err(Error::InvalidArgument(format!("maj-table entries must be odd in 3..=17, got {n}")));
        }
        if n == 15 && !(opts.allow_15 || opts.allow_17) {
            return Err(Error::SizeLimit("n = 15 is gated; enable it explicitly".into()));
        }
        if n == 17 && !opts.allow_17 {
            return Err(Error::SizeLimit("n = 17 needs about 1 GiB and hours; enable it explicitly".into()));
        }
    }
    ns.iter()
        .map(|&n| {
            if let Some(dir) = &opts.cache_dir {
                let path = cache_path(dir, n);
                if let Ok(file) = fs::File::open(&path) {
                    let m = read_dump(std::io::BufReader::new(file), MemoryBudget::unlimited())?;
                    if m.cols() == 1 << n {
                        return Ok(MajRow { n, nlbc: m.rows() });
                    }
                }
            }
            let g = TruthTable::majority(n)?;
            let budget = if n == 17 { MemoryBudget::unlimited() } else { MemoryBudget::default() };
            let basis = mfprime_basis(
                &TwoPartyFunction::xor(g),
                NlbcOptions { budget, strategy: opts.strategy.unwrap_or(Elimination::Auto) },
            )?;
            if let Some(dir) = &opts.cache_dir {
                fs::create_dir_all(dir)?;
                let file = fs::File::create(cache_path(dir, n))?;
                write_dump(&basis.to_matrix()?, std::io::BufWriter::new(file))?;
            }
            Ok(MajRow { n, nlbc: basis.rank() })
        })
        .collect()
}
