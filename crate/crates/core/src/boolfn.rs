// SPDX-License-Identifier: Apache-2.0

//! Generator functions `Phi: B^n x B^m -> B^n` as total truth tables.
//!
//! Row `r` of a table holds `Phi(mu, lambda)` for
//! `r = sum_i mu_i 2^(i-1) + 2^n sum_j lambda_j 2^(j-1)`, i.e. `mu` occupies the
//! low `n` bits of the row index and `lambda` the next `m`. Outputs are packed
//! the same way as [`BitVec`].
//!
//! Everything here that walks the whole table refuses to run when `n + m`
//! exceeds [`size_limit`].

use std::sync::OnceLock;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::bits::BitVec;
use crate::error::{DependencyWitness, Error, Result};

pub const DEFAULT_SIZE_LIMIT: usize = 20;
pub const SIZE_LIMIT_ENV: &str = "ASYNC_DEC_SIZE_LIMIT";

/// The exhaustive-scan limit on `n + m`: `ASYNC_DEC_SIZE_LIMIT` when set to a
/// number, otherwise [`DEFAULT_SIZE_LIMIT`]. Read once per process.
pub fn size_limit() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(SIZE_LIMIT_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_SIZE_LIMIT)
    })
}

// Tables beyond this many index bits are never materialized, whatever the limit says.
const HARD_LIMIT: usize = 30;

fn check_bits(n: usize, m: usize, limit: usize) -> Result<()> {
    let bits = n + m;
    let limit = limit.min(HARD_LIMIT);
    if bits > limit {
        Err(Error::SizeLimit { bits, limit })
    } else {
        Ok(())
    }
}

/// Checks `n + m` against the size limit without building anything.
pub(crate) fn check_dimensions(n: usize, m: usize) -> Result<()> {
    check_bits(n, m, size_limit())
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeneratorFn {
    n: usize,
    m: usize,
    table: Vec<u64>,
}

impl GeneratorFn {
    /// Builds `Phi` from its rows in index order.
    pub fn from_table(n: usize, m: usize, table: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::WidthOutOfRange(0));
        }
        check_bits(n, m, HARD_LIMIT)?;
        let expected = 1usize << (n + m);
        if table.len() != expected {
            return Err(Error::TableSize {
                expected,
                found: table.len(),
            });
        }
        let mask = (1u64 << n) - 1;
        if let Some(row) = table.iter().position(|&v| v & !mask != 0) {
            return Err(Error::BadSelection(format!(
                "row {row} has an output wider than {n} bits"
            )));
        }
        Ok(GeneratorFn { n, m, table })
    }

    /// Tabulates `f` over all of `B^n x B^m`.
    pub fn from_fn(n: usize, m: usize, f: impl Fn(BitVec, BitVec) -> BitVec) -> Result<Self> {
        if n == 0 {
            return Err(Error::WidthOutOfRange(0));
        }
        check_bits(n, m, size_limit())?;
        let table = (0..1u64 << (n + m))
            .map(|row| {
                let (mu, lambda) = split_row(n, m, row);
                let out = f(mu, lambda);
                if out.width() != n {
                    return Err(Error::WidthMismatch {
                        expected: n,
                        found: out.width(),
                    });
                }
                Ok(out.bits())
            })
            .collect::<Result<_>>()?;
        Ok(GeneratorFn { n, m, table })
    }

    /// `Phi(mu, lambda) = mu`.
    pub fn identity(n: usize, m: usize) -> Result<Self> {
        Self::from_fn(n, m, |mu, _| mu)
    }

    pub fn constant(n: usize, m: usize, value: BitVec) -> Result<Self> {
        Self::from_fn(n, m, |_, _| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn rows(&self) -> usize {
        self.table.len()
    }

    pub fn check_size(&self, limit: usize) -> Result<()> {
        check_bits(self.n, self.m, limit)
    }

    pub fn row_index(&self, mu: &BitVec, lambda: &BitVec) -> Result<usize> {
        if mu.width() != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: mu.width(),
            });
        }
        if lambda.width() != self.m {
            return Err(Error::WidthMismatch {
                expected: self.m,
                found: lambda.width(),
            });
        }
        Ok((mu.bits() | lambda.bits() << self.n) as usize)
    }

    pub fn eval(&self, mu: &BitVec, lambda: &BitVec) -> Result<BitVec> {
        let row = self.row_index(mu, lambda)?;
        Ok(BitVec::truncated(self.n, self.table[row]))
    }

    /// The `(mu, lambda)` of a row index.
    pub fn point(&self, row: usize) -> (BitVec, BitVec) {
        split_row(self.n, self.m, row as u64)
    }

    /// `Phi~(mu~, lambda)`, the function seen after relabelling coordinates so that
    /// new coordinate `k` is old coordinate `perm[k - 1]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut table = vec![0u64; self.table.len()];
        for (row, out) in table.iter_mut().enumerate() {
            let (mu_new, lambda) = self.point(row);
            let mu_old = mu_new.scatter(perm)?;
            let old = self.eval(&mu_old, &lambda)?;
            *out = old.select(perm)?.bits();
        }
        Ok(GeneratorFn {
            n: self.n,
            m: self.m,
            table,
        })
    }
}

fn split_row(n: usize, m: usize, row: u64) -> (BitVec, BitVec) {
    (
        BitVec::truncated(n, row),
        BitVec::truncated(m, row >> n),
    )
}

impl std::fmt::Debug for GeneratorFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GeneratorFn(n={}, m={}, {:?})", self.n, self.m, self.table)
    }
}

/// A Boolean function `B^n x B^m -> B` given by its values in row order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolTable {
    n: usize,
    m: usize,
    values: Vec<bool>,
}

impl BoolTable {
    pub fn get(&self, mu: &BitVec, lambda: &BitVec) -> Result<bool> {
        if mu.width() != self.n || lambda.width() != self.m {
            return Err(Error::WidthMismatch {
                expected: self.n + self.m,
                found: mu.width() + lambda.width(),
            });
        }
        Ok(self.values[(mu.bits() | lambda.bits() << self.n) as usize])
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn is_identically_zero(&self) -> bool {
        !self.values.iter().any(|&v| v)
    }

    /// First row where the function is 1.
    pub fn first_one(&self) -> Option<(BitVec, BitVec)> {
        self.values
            .iter()
            .position(|&v| v)
            .map(|row| split_row(self.n, self.m, row as u64))
    }
}

fn check_coordinate(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::IndexOutOfRange { index: i, width: n })
    } else {
        Ok(())
    }
}

/// `dPhi_i/dmu_j (mu, lambda) = Phi_i(.., mu_j, ..) xor Phi_i(.., !mu_j, ..)`.
pub fn partial_derivative(phi: &GeneratorFn, i: usize, j: usize) -> Result<BoolTable> {
    phi.check_size(size_limit())?;
    check_coordinate(i, phi.n)?;
    check_coordinate(j, phi.n)?;
    let out_bit = i - 1;
    let flip = 1usize << (j - 1);
    let values = (0..phi.rows())
        .map(|row| (phi.table[row] ^ phi.table[row ^ flip]) >> out_bit & 1 == 1)
        .collect();
    Ok(BoolTable {
        n: phi.n,
        m: phi.m,
        values,
    })
}

/// `D[i][j] = 1` iff `Phi_i` depends on `mu_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DependencyMatrix {
    n: usize,
    // rows[i - 1] has bit j - 1 set iff D[i][j] = 1
    rows: Vec<u64>,
}

impl DependencyMatrix {
    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        let n = rows.len();
        let packed = rows
            .iter()
            .map(|r| {
                if r.len() != n {
                    return Err(Error::WidthMismatch {
                        expected: n,
                        found: r.len(),
                    });
                }
                Ok(r.iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, &b)| acc | (((b != 0) as u64) << j)))
            })
            .collect::<Result<_>>()?;
        Ok(DependencyMatrix { n, rows: packed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i - 1] >> (j - 1) & 1 == 1
    }

    /// Dense 0/1 rows, for reports.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (1..=self.n)
            .map(|i| (1..=self.n).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    /// No dependency crosses between `block` and its complement.
    pub fn separates(&self, block: &[usize]) -> bool {
        let inside = block.iter().fold(0u64, |acc, &c| acc | 1 << (c - 1));
        let all = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        let outside = all & !inside;
        (1..=self.n).all(|i| {
            let row = self.rows[i - 1];
            if inside >> (i - 1) & 1 == 1 {
                row & outside == 0
            } else {
                row & inside == 0
            }
        })
    }
}

impl std::fmt::Display for DependencyMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in self.to_rows() {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for DependencyMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

pub fn dependency_matrix(phi: &GeneratorFn) -> Result<DependencyMatrix> {
    phi.check_size(size_limit())?;
    let n = phi.n;
    let mut rows = vec![0u64; n];
    for row in 0..phi.rows() {
        let here = phi.table[row];
        for j in 0..n {
            let diff = here ^ phi.table[row ^ (1 << j)];
            if diff == 0 {
                continue;
            }
            for (i, r) in rows.iter_mut().enumerate() {
                *r |= (diff >> i & 1) << j;
            }
        }
    }
    Ok(DependencyMatrix { n, rows })
}

/// `(Phi' || Phi'')((mu', mu''), lambda) = (Phi'(mu', lambda), Phi''(mu'', lambda))`.
pub fn parallel_fn(first: &GeneratorFn, second: &GeneratorFn) -> Result<GeneratorFn> {
    if first.m != second.m {
        return Err(Error::WidthMismatch {
            expected: first.m,
            found: second.m,
        });
    }
    let (n1, n2, m) = (first.n, second.n, first.m);
    let n = n1 + n2;
    check_bits(n, m, size_limit())?;
    let mask1 = (1usize << n1) - 1;
    let mask2 = (1usize << n2) - 1;
    let table = (0..1usize << (n + m))
        .map(|row| {
            let lambda = row >> n;
            let r1 = (row & mask1) | lambda << n1;
            let r2 = (row >> n1 & mask2) | lambda << n2;
            first.table[r1] | second.table[r2] << n1
        })
        .collect();
    Ok(GeneratorFn { n, m, table })
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::WidthMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    crate::signals::check_selection(perm, n)
}

/// Checks that `block` is a nonempty proper subset of `1..=n` without repeats,
/// and returns it sorted.
pub fn check_block(block: &[usize], n: usize) -> Result<Vec<usize>> {
    if block.is_empty() || block.len() >= n {
        return Err(Error::TrivialBlock(n));
    }
    crate::signals::check_selection(block, n)?;
    let mut sorted = block.to_vec();
    sorted.sort_unstable();
    Ok(sorted)
}

pub fn complement(block: &[usize], n: usize) -> Vec<usize> {
    (1..=n).filter(|c| !block.contains(c)).collect()
}

/// An ordered partition of `1..=n` into blocks, with the relabelling that
/// lists the blocks contiguously in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    permutation: Vec<usize>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        if blocks.iter().any(Vec::is_empty) {
            return Err(Error::BadSelection("empty block".into()));
        }
        let permutation: Vec<usize> = blocks.iter().flatten().copied().collect();
        check_permutation(&permutation, n)?;
        Ok(Partition {
            blocks,
            permutation,
        })
    }

    /// `block` first, then its complement, each in increasing order.
    pub fn bipartition(block: &[usize], n: usize) -> Result<Self> {
        let block = check_block(block, n)?;
        let rest = complement(&block, n);
        Partition::new(vec![block, rest], n)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// New coordinate `k` is old coordinate `permutation()[k - 1]`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn n(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(k, &c)| c == k + 1)
    }

    /// Whether every block of `self` lies inside some block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.blocks.iter().all(|b| {
            other
                .blocks
                .iter()
                .any(|ob| b.iter().all(|c| ob.contains(c)))
        })
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(usize::to_string).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        f.write_str(&blocks.join(" "))
    }
}

/// Each block of `partition` paired with the complement it is separated from,
/// for blocks that are separated. Empty for a one-block partition.
pub fn certificates(phi: &GeneratorFn, partition: &Partition) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if partition.blocks().len() < 2 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for b in partition.blocks() {
        if is_separated(phi, b)? {
            out.push((b.clone(), complement(b, phi.n())));
        }
    }
    Ok(out)
}

/// First cross-block dependency of `phi` w.r.t. `block`, scanning `i`, then `j`,
/// then rows in increasing order.
pub fn separation_witness(phi: &GeneratorFn, block: &[usize]) -> Result<Option<DependencyWitness>> {
    phi.check_size(size_limit())?;
    let block = check_block(block, phi.n)?;
    let rest = complement(&block, phi.n);
    for i in 1..=phi.n {
        let others = if block.contains(&i) { &rest } else { &block };
        for &j in others {
            if let Some((mu, lambda)) = partial_derivative(phi, i, j)?.first_one() {
                return Ok(Some(DependencyWitness { i, j, mu, lambda }));
            }
        }
    }
    Ok(None)
}

/// Cross-block partial derivatives all vanish identically.
pub fn is_separated(phi: &GeneratorFn, block: &[usize]) -> Result<bool> {
    Ok(separation_witness(phi, block)?.is_none())
}

/// Separation checked by flipping: for every point, every `i` and every `j`
/// on the other side of the cut, complementing `mu_j` leaves `Phi_i` unchanged.
pub fn separated_by_flips(phi: &GeneratorFn, block: &[usize]) -> Result<bool> {
    phi.check_size(size_limit())?;
    let block = check_block(block, phi.n)?;
    let rest = complement(&block, phi.n);
    for row in 0..phi.rows() {
        let (mu, lambda) = phi.point(row);
        let here = phi.eval(&mu, &lambda)?;
        for i in 1..=phi.n {
            let others = if block.contains(&i) { &rest } else { &block };
            for &j in others {
                let there = phi.eval(&mu.flipped(j)?, &lambda)?;
                if here.get(i)? != there.get(i)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Separation checked constructively: extract both factors by fixing the other
/// side to zero, recompose them and compare with the relabelled `phi` on all rows.
pub fn separated_by_recomposition(phi: &GeneratorFn, block: &[usize]) -> Result<bool> {
    let partition = Partition::bipartition(block, phi.n)?;
    let (first, second) = extract_factors(phi, &partition)?;
    Ok(parallel_fn(&first, &second)? == phi.permuted(partition.permutation())?)
}

/// `Phi'` on `blocks[0]` and `Phi''` on `blocks[1]`, read off with the opposite
/// coordinates held at `fill`. Meaningful only when the blocks are separated.
fn extract_with(
    phi: &GeneratorFn,
    partition: &Partition,
    fill: &BitVec,
) -> Result<(GeneratorFn, GeneratorFn)> {
    let [a, b] = partition.blocks() else {
        return Err(Error::BadSelection("expected a bipartition".into()));
    };
    let factor = |mine: &[usize]| -> Result<GeneratorFn> {
        let k = mine.len();
        let mut table = Vec::with_capacity(1 << (k + phi.m));
        for row in 0..1u64 << (k + phi.m) {
            let (local, lambda) = split_row(k, phi.m, row);
            let mut mu = *fill;
            for (p, &c) in mine.iter().enumerate() {
                mu = mu.with(c, local.get(p + 1)?)?;
            }
            table.push(phi.eval(&mu, &lambda)?.select(mine)?.bits());
        }
        GeneratorFn::from_table(k, phi.m, table)
    };
    Ok((factor(a)?, factor(b)?))
}

fn extract_factors(phi: &GeneratorFn, partition: &Partition) -> Result<(GeneratorFn, GeneratorFn)> {
    extract_with(phi, partition, &BitVec::zeros(phi.n))
}

/// Factors read off with the opposite side held at an arbitrary `fill` instead of
/// zero. For separated blocks the result does not depend on `fill`.
pub fn extract_factors_at(
    phi: &GeneratorFn,
    block: &[usize],
    fill: &BitVec,
) -> Result<(GeneratorFn, GeneratorFn)> {
    if fill.width() != phi.n {
        return Err(Error::WidthMismatch {
            expected: phi.n,
            found: fill.width(),
        });
    }
    extract_with(phi, &Partition::bipartition(block, phi.n)?, fill)
}

/// The two factors of a split and the relabelling they refer to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub first: GeneratorFn,
    pub second: GeneratorFn,
    pub partition: Partition,
}

/// Splits `phi` along a separated `block`: after relabelling by
/// `partition.permutation()`, `phi = first || second`.
pub fn split_fn(phi: &GeneratorFn, block: &[usize]) -> Result<Split> {
    if let Some(w) = separation_witness(phi, block)? {
        return Err(Error::NotSeparated(w));
    }
    let partition = Partition::bipartition(block, phi.n)?;
    let (first, second) = extract_factors(phi, &partition)?;
    Ok(Split {
        first,
        second,
        partition,
    })
}

/// Connected components of the symmetric dependency graph on `1..=n`, ordered
/// by smallest member.
pub fn finest_partition(phi: &GeneratorFn) -> Result<Partition> {
    let deps = dependency_matrix(phi)?;
    partition_of(&deps)
}

pub fn partition_of(deps: &DependencyMatrix) -> Result<Partition> {
    let n = deps.n();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 1..=n {
        for j in 1..=n {
            if deps.get(i, j) {
                uf.union(i - 1, j - 1);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for (k, &root) in labels.iter().enumerate() {
        match seen.iter().find(|(r, _)| *r == root) {
            Some(&(_, b)) => blocks[b].push(k + 1),
            None => {
                seen.push((root, blocks.len()));
                blocks.push(vec![k + 1]);
            }
        }
    }
    Partition::new(blocks, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bv;

    fn phi_from(n: usize, m: usize, f: impl Fn(&[bool], &[bool]) -> Vec<bool>) -> GeneratorFn {
        GeneratorFn::from_fn(n, m, |mu, lambda| {
            let mu: Vec<bool> = mu.iter().collect();
            let lambda: Vec<bool> = lambda.iter().collect();
            BitVec::from_bools(&f(&mu, &lambda)).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = GeneratorFn::identity(2, 1).unwrap();
        assert_eq!(id.eval(&bv("01"), &bv("1")).unwrap(), bv("01"));
        let copy = phi_from(1, 1, |_, l| vec![l[0]]);
        assert_eq!(copy.eval(&bv("0"), &bv("1")).unwrap(), bv("1"));
        assert!(matches!(
            copy.eval(&bv("00"), &bv("1")),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn row_index_convention() {
        let phi = GeneratorFn::identity(2, 2).unwrap();
        // mu_1 is bit 0, lambda_1 is bit n
        assert_eq!(phi.row_index(&bv("10"), &bv("00")).unwrap(), 1);
        assert_eq!(phi.row_index(&bv("01"), &bv("00")).unwrap(), 2);
        assert_eq!(phi.row_index(&bv("00"), &bv("10")).unwrap(), 4);
        assert_eq!(phi.row_index(&bv("11"), &bv("01")).unwrap(), 11);
        assert_eq!(phi.point(11), (bv("11"), bv("01")));
    }

    #[test]
    fn derivative_of_product_term() {
        // Phi_1 = mu_1 mu_2, no inputs: dPhi_1/dmu_2 = mu_1
        let phi = phi_from(2, 0, |mu, _| vec![mu[0] & mu[1], mu[1]]);
        let d = partial_derivative(&phi, 1, 2).unwrap();
        let lambda = BitVec::empty();
        for mu in BitVec::all(2) {
            assert_eq!(d.get(&mu, &lambda).unwrap(), mu.get(1).unwrap());
        }
    }

    #[test]
    fn derivative_of_constant_and_xor() {
        let k = GeneratorFn::constant(2, 1, bv("10")).unwrap();
        for i in 1..=2 {
            for j in 1..=2 {
                assert!(partial_derivative(&k, i, j).unwrap().is_identically_zero());
            }
        }
        let x = phi_from(1, 1, |mu, l| vec![mu[0] ^ l[0]]);
        let d = partial_derivative(&x, 1, 1).unwrap();
        assert!(d.values().iter().all(|&v| v));
        assert!(partial_derivative(&x, 2, 1).is_err());
        assert!(partial_derivative(&x, 1, 0).is_err());
    }

    #[test]
    fn dependency_matrix_examples() {
        let phi = phi_from(2, 1, |mu, l| vec![mu[0] ^ l[0], mu[1]]);
        let d = dependency_matrix(&phi).unwrap();
        assert_eq!(d.to_rows(), vec![vec![1, 0], vec![0, 1]]);

        let k = GeneratorFn::constant(3, 1, bv("101")).unwrap();
        assert_eq!(dependency_matrix(&k).unwrap().to_rows(), vec![vec![0; 3]; 3]);

        let a = phi_from(2, 1, |mu, l| vec![mu[1] & l[0], mu[0] | mu[1]]);
        let b = phi_from(1, 1, |mu, l| vec![!mu[0] ^ l[0]]);
        let ab = parallel_fn(&a, &b).unwrap();
        let d = dependency_matrix(&ab).unwrap();
        assert!(d.separates(&[1, 2]));
        for i in 1..=2 {
            assert!(!d.get(i, 3));
            assert!(!d.get(3, i));
        }
    }

    #[test]
    fn parallel_fn_examples() {
        let id1 = GeneratorFn::identity(1, 1).unwrap();
        let id2 = GeneratorFn::identity(2, 1).unwrap();
        assert_eq!(
            parallel_fn(&id1, &id2).unwrap(),
            GeneratorFn::identity(3, 1).unwrap()
        );

        let copy = phi_from(1, 1, |_, l| vec![l[0]]);
        let neg = phi_from(1, 1, |mu, _| vec![!mu[0]]);
        let p = parallel_fn(&copy, &neg).unwrap();
        assert_eq!(p.eval(&bv("10"), &bv("1")).unwrap(), bv("11"));

        let no_input = GeneratorFn::identity(1, 0).unwrap();
        assert!(matches!(
            parallel_fn(&copy, &no_input),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn is_separated_examples() {
        let a = phi_from(1, 1, |mu, l| vec![mu[0] & l[0]]);
        let b = phi_from(2, 1, |mu, _| vec![mu[1], mu[0]]);
        let ab = parallel_fn(&a, &b).unwrap();
        assert!(is_separated(&ab, &[1]).unwrap());

        let swap = phi_from(2, 0, |mu, _| vec![mu[1], mu[0]]);
        assert!(!is_separated(&swap, &[1]).unwrap());
        let w = separation_witness(&swap, &[1]).unwrap().unwrap();
        assert_eq!((w.i, w.j), (1, 2));

        let one = GeneratorFn::identity(1, 1).unwrap();
        assert!(matches!(is_separated(&one, &[1]), Err(Error::TrivialBlock(1))));
        assert!(matches!(is_separated(&swap, &[]), Err(Error::TrivialBlock(2))));
        assert!(matches!(
            is_separated(&swap, &[1, 2]),
            Err(Error::TrivialBlock(2))
        ));
    }

    #[test]
    fn finest_partition_examples() {
        let a = phi_from(1, 1, |mu, l| vec![mu[0] ^ l[0]]);
        let b = phi_from(2, 1, |mu, l| vec![mu[1] & l[0], mu[0]]);
        let c = phi_from(1, 1, |mu, _| vec![!mu[0]]);
        let abc = parallel_fn(&parallel_fn(&a, &b).unwrap(), &c).unwrap();
        let p = finest_partition(&abc).unwrap();
        assert_eq!(p.blocks(), &[vec![1], vec![2, 3], vec![4]]);

        let coupled = phi_from(3, 0, |mu, _| {
            let x = mu[0] ^ mu[1] ^ mu[2];
            vec![x, x, x]
        });
        assert_eq!(finest_partition(&coupled).unwrap().blocks(), &[vec![1, 2, 3]]);

        let k = GeneratorFn::constant(3, 1, bv("000")).unwrap();
        assert_eq!(
            finest_partition(&k).unwrap().blocks(),
            &[vec![1], vec![2], vec![3]]
        );
    }

    #[test]
    fn finest_partition_groups_non_contiguous_coordinates() {
        // Phi_1 reads mu_3, Phi_2 reads mu_2 only
        let phi = phi_from(3, 0, |mu, _| vec![mu[2], mu[1], mu[0]]);
        let p = finest_partition(&phi).unwrap();
        assert_eq!(p.blocks(), &[vec![1, 3], vec![2]]);
        assert_eq!(p.permutation(), &[1, 3, 2]);
    }

    #[test]
    fn split_fn_of_parallel_recovers_factors() {
        let a = phi_from(2, 1, |mu, l| vec![mu[1] ^ l[0], mu[0] & mu[1]]);
        let b = phi_from(1, 1, |mu, l| vec![mu[0] | l[0]]);
        let ab = parallel_fn(&a, &b).unwrap();
        let split = split_fn(&ab, &[1, 2]).unwrap();
        assert_eq!(split.first, a);
        assert_eq!(split.second, b);
        assert!(split.partition.is_identity());
    }

    #[test]
    fn split_fn_with_permutation() {
        let neg = phi_from(2, 0, |mu, _| vec![!mu[0], !mu[1]]);
        let split = split_fn(&neg, &[2]).unwrap();
        let not1 = phi_from(1, 0, |mu, _| vec![!mu[0]]);
        assert_eq!(split.first, not1);
        assert_eq!(split.second, not1);
        assert_eq!(split.partition.permutation(), &[2, 1]);
        let recomposed = parallel_fn(&split.first, &split.second).unwrap();
        assert_eq!(recomposed, neg.permuted(split.partition.permutation()).unwrap());
    }

    #[test]
    fn split_fn_refuses_with_witness() {
        let swap = phi_from(2, 0, |mu, _| vec![mu[1], mu[0]]);
        match split_fn(&swap, &[1]) {
            Err(Error::NotSeparated(w)) => {
                let d = partial_derivative(&swap, w.i, w.j).unwrap();
                assert!(d.get(&w.mu, &w.lambda).unwrap());
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn permuted_round_trip() {
        let phi = phi_from(3, 1, |mu, l| vec![mu[1] & l[0], mu[2] | mu[0], !mu[1]]);
        let perm = [3, 1, 2];
        let inverse = [2, 3, 1];
        assert_eq!(phi.permuted(&perm).unwrap().permuted(&inverse).unwrap(), phi);
        assert!(phi.permuted(&[1, 1, 2]).is_err());
    }

    #[test]
    fn size_limit_is_enforced() {
        let phi = GeneratorFn::identity(3, 2).unwrap();
        assert!(phi.check_size(5).is_ok());
        assert!(matches!(
            phi.check_size(4),
            Err(Error::SizeLimit { bits: 5, limit: 4 })
        ));
    }

    #[test]
    fn from_table_validates() {
        assert!(matches!(
            GeneratorFn::from_table(1, 1, vec![0, 1, 1]),
            Err(Error::TableSize { .. })
        ));
        assert!(GeneratorFn::from_table(1, 0, vec![0, 2]).is_err());
        assert!(GeneratorFn::from_table(0, 1, vec![0, 0]).is_err());
    }
}
