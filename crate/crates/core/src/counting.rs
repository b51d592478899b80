//! Upper bounds on the size of the generated tileset, from the first
//! network and from an auxiliary second network.

use std::fmt;

use crate::error::{Error, Result};
use crate::layout::Layout;

/// Shape parameters of a system with its networks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountParams {
    /// Number of rules.
    pub r: u64,
    /// Total number of tiles.
    pub n: u64,
    /// Total number of internal facets.
    pub m: u64,
    /// Tiles lying on first networks, centers included.
    pub p: u64,
    /// Tiles lying on second networks.
    pub q: Option<u64>,
    /// Tiles shared by first-network branches and second networks.
    pub c: Option<u64>,
    /// Total number of first-network branches; each needs a crossing.
    pub branches: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FirstBound {
    pub n0: u128,
    pub np: u128,
    pub bound: u128,
    pub coarse: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SecondBound {
    pub n0: u128,
    pub nq: u128,
    pub np: u128,
    pub nc: u128,
    pub bound: u128,
    pub coarse: u128,
}

impl fmt::Display for FirstBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N0={} Np={} bound={} coarse={}",
            self.n0, self.np, self.bound, self.coarse
        )
    }
}

impl fmt::Display for SecondBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N'0={} N'q={} N'p={} N'c={} bound={} coarse={}",
            self.n0, self.nq, self.np, self.nc, self.bound, self.coarse
        )
    }
}

impl CountParams {
    pub fn first(r: u64, n: u64, m: u64, p: u64) -> Self {
        CountParams {
            r,
            n,
            m,
            p,
            q: None,
            c: None,
            branches: 0,
        }
    }

    /// Reads the parameters off a layout. `q` and `c` are set only when
    /// every rule has a second network.
    pub fn from_layout(layout: &Layout) -> Self {
        let sys = &layout.system;
        let nets = &layout.networks;
        let r = sys.rules.len() as u64;
        let branches = (0..sys.rules.len())
            .filter_map(|ri| nets.get(ri))
            .map(|n| n.branches.len() as u64)
            .sum();
        let all_second = (0..sys.rules.len()).all(|ri| nets.second(ri).is_some());
        let (q, c) = if all_second && r > 0 {
            let q = (0..sys.rules.len())
                .filter_map(|ri| nets.second(ri))
                .map(|s| s.cells.len() as u64)
                .sum();
            let c = (0..sys.rules.len())
                .filter_map(|ri| nets.second(ri))
                .map(|s| s.crossings.len() as u64)
                .sum();
            (Some(q), Some(c))
        } else {
            (None, None)
        };
        CountParams {
            r,
            n: layout.n() as u64,
            m: layout.numbering.m() as u64,
            p: layout.network_tile_count() as u64,
            q,
            c,
            branches,
        }
    }

    /// Checks the first-network constraints: `r ≥ 1` (or an empty system),
    /// `r ≤ p ≤ n`, and `m ≥ n − r`, which every family of connected
    /// templates satisfies.
    pub fn check_first(&self) -> Result<()> {
        let CountParams { r, n, m, p, .. } = *self;
        if r == 0 && (n, m, p) != (0, 0, 0) {
            return Err(Error::InvalidParams(
                "r = 0 requires an empty system".into(),
            ));
        }
        if p > n {
            return Err(Error::InvalidParams(format!("p = {p} exceeds n = {n}")));
        }
        if p < r {
            return Err(Error::InvalidParams(format!("p = {p} is below r = {r}")));
        }
        if m + r < n {
            return Err(Error::InvalidParams(format!(
                "m = {m} is below n - r = {}",
                n - r
            )));
        }
        Ok(())
    }

    /// Returns `(q, c)` after checking the second-network constraints:
    /// `1 ≤ c ≤ min(p, q)`, `q ≤ n`, `p + q − c ≤ n`, and `c` at least the
    /// number of branches.
    pub fn check_second(&self) -> Result<(u64, u64)> {
        self.check_first()?;
        let (Some(q), Some(c)) = (self.q, self.c) else {
            return Err(Error::InvalidParams("no second network parameters".into()));
        };
        if c == 0 {
            return Err(Error::InvalidParams(
                "c = 0: the second network crosses no branch".into(),
            ));
        }
        if c > self.p.min(q) {
            return Err(Error::InvalidParams(format!("c = {c} exceeds min(p, q)")));
        }
        if q > self.n || self.p + q - c > self.n {
            return Err(Error::InvalidParams(format!(
                "p + q - c = {} exceeds n = {}",
                self.p + q - c,
                self.n
            )));
        }
        if c < self.branches {
            return Err(Error::InvalidParams(format!(
                "c = {c} crossings cannot cross all {} branches",
                self.branches
            )));
        }
        Ok((q, c))
    }
}

/// First-network bound: `N0 = (n−p)n`, `Np = (p−r)((n−p)n + pmn)`,
/// `bound = (r+1)(N0+Np)`, `coarse = (r+2)p²mn`.
pub fn count_bound_first(params: &CountParams) -> Result<FirstBound> {
    params.check_first()?;
    let (r, n, m, p) = (
        params.r as u128,
        params.n as u128,
        params.m as u128,
        params.p as u128,
    );
    let n0 = (n - p) * n;
    let np = (p - r) * ((n - p) * n + p * m * n);
    let bound = (r + 1) * (n0 + np);
    let coarse = (r + 2) * p * p * m * n;
    assert!(
        bound <= coarse,
        "first bound {bound} above coarse bound {coarse}"
    );
    Ok(FirstBound {
        n0,
        np,
        bound,
        coarse,
    })
}

/// Second-network bound: `N'0 = n−p−q+c`, `N'q = (q−c)n`,
/// `N'p = (p−c)(m+qn)`, `N'c = c(N'0+N'q+N'p)`,
/// `bound = (r+1)(N'0+N'q+N'p+N'c)`, `coarse = (r+2)cp(m+qn)`.
pub fn count_bound_second(params: &CountParams) -> Result<SecondBound> {
    let (q, c) = params.check_second()?;
    let (r, n, m, p, q, c) = (
        params.r as u128,
        params.n as u128,
        params.m as u128,
        params.p as u128,
        q as u128,
        c as u128,
    );
    let n0 = n + c - p - q;
    let nq = (q - c) * n;
    let np = (p - c) * (m + q * n);
    let nc = c * (n0 + nq + np);
    let bound = (r + 1) * (n0 + nq + np + nc);
    let coarse = (r + 2) * c * p * (m + q * n);
    Ok(SecondBound {
        n0,
        nq,
        np,
        nc,
        bound,
        coarse,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    pub size: usize,
    pub n0: u128,
    pub bound: u128,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "size={} N0={} bound={} within={}",
            self.size,
            self.n0,
            self.bound,
            self.size as u128 <= self.bound
        )
    }
}

/// Compares a generated tileset size with the first bound.
pub fn exact_count(size: usize, params: &CountParams) -> Result<ComparisonReport> {
    let b = count_bound_first(params)?;
    if size as u128 > b.bound {
        return Err(Error::BoundViolated {
            size,
            bound: b.bound,
        });
    }
    Ok(ComparisonReport {
        size,
        n0: b.n0,
        bound: b.bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::square3x3;

    #[test]
    fn bundled_parameters() {
        let layout = Layout::from_document(&square3x3()).unwrap();
        let p = CountParams::from_layout(&layout);
        assert_eq!((p.r, p.n, p.m, p.p), (1, 9, 12, 5));
        assert_eq!((p.q, p.c, p.branches), (Some(5), Some(4), 4));
    }

    #[test]
    fn p_equal_r_kills_np() {
        let b = count_bound_first(&CountParams::first(2, 6, 6, 2)).unwrap();
        assert_eq!(b.np, 0);
        assert_eq!(b.bound, 3 * b.n0);
    }

    #[test]
    fn p_below_r_is_invalid() {
        assert!(matches!(
            count_bound_first(&CountParams::first(3, 9, 12, 2)),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn zero_crossings_is_invalid() {
        let mut p = CountParams::first(1, 9, 12, 5);
        p.q = Some(5);
        p.c = Some(0);
        assert!(matches!(
            count_bound_second(&p),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn q_equal_c_kills_nq() {
        let mut p = CountParams::first(1, 9, 12, 5);
        p.q = Some(4);
        p.c = Some(4);
        assert_eq!(count_bound_second(&p).unwrap().nq, 0);
    }

    #[test]
    fn too_few_crossings_for_branches() {
        let mut p = CountParams::first(1, 9, 12, 5);
        p.q = Some(5);
        p.c = Some(3);
        p.branches = 4;
        assert!(count_bound_second(&p).is_err());
    }

    #[test]
    fn empty_system_is_degenerate() {
        let r = exact_count(0, &CountParams::first(0, 0, 0, 0)).unwrap();
        assert_eq!((r.size, r.bound), (0, 0));
    }

    #[test]
    fn oversized_tileset_is_flagged() {
        assert!(matches!(
            exact_count(4681, &CountParams::first(1, 9, 12, 5)),
            Err(Error::BoundViolated { bound: 4680, .. })
        ));
    }
}
