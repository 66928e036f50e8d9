//! Marginally trapped spheres: roots of the null expansions
//! `θ± = H ± tr_S k` of the centered spheres.
//!
//! The scan walks the grid cells of each expansion sheet, refines every
//! sign change by bisection on the pointwise evaluator (exact closures for
//! closed-form data, the local-cubic interpolant for tabulated data), and
//! records exact node zeros as unrefined roots. Tangencies that dip below
//! zero and recover entirely inside one cell are invisible to a node scan
//! and are not reported.

use crate::geometry;
use crate::numerics;
use crate::radial_data::{Domain, InitialData};

/// Which expansion: future (`θ₊ = H + tr_S k`) or past (`θ₋ = H − tr_S k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    /// Short tag for report rows.
    pub fn tag(self) -> &'static str {
        match self {
            Sheet::Plus => "theta_plus",
            Sheet::Minus => "theta_minus",
        }
    }
}

/// Evaluate one expansion at any radius in the domain (`r > 0` on a ball).
pub fn expansion_at(data: &InitialData, sheet: Sheet, r: f64) -> f64 {
    let p = geometry::geometry_at(data, r);
    match sheet {
        Sheet::Plus => p.theta_plus,
        Sheet::Minus => p.theta_minus,
    }
}

/// One located root of an expansion.
#[derive(Debug, Clone, Copy)]
pub struct HorizonRoot {
    pub sheet: Sheet,
    /// Root radius: bisection-refined for sign changes, the node itself for
    /// exact node zeros (those are left unrefined).
    pub r: f64,
    /// Bracket in which the root was found.
    pub bracket: (f64, f64),
    /// Whether the expansion changes sign across the root.
    pub crossing: bool,
}

/// Scan result for one expansion sheet.
#[derive(Debug, Clone)]
pub struct SheetScan {
    pub sheet: Sheet,
    pub roots: Vec<HorizonRoot>,
    /// Smallest node value over the scanned nodes (center excluded on balls,
    /// where the expansion diverges to `+inf`).
    pub min_value: f64,
    /// Radius of the smallest node value.
    pub min_r: f64,
}

impl SheetScan {
    /// Whether the sheet stays strictly positive on the scanned nodes.
    pub fn always_positive(&self) -> bool {
        self.roots.is_empty() && self.min_value > 0.0
    }
}

/// Both-sheet scan of a data set.
#[derive(Debug, Clone)]
pub struct HorizonReport {
    pub plus: SheetScan,
    pub minus: SheetScan,
}

impl HorizonReport {
    /// All roots, both sheets.
    pub fn roots(&self) -> impl Iterator<Item = &HorizonRoot> {
        self.plus.roots.iter().chain(self.minus.roots.iter())
    }

    /// Whether any marginally trapped sphere (either sheet) was found, or
    /// any node has a nonpositive expansion.
    pub fn contains_horizon(&self) -> bool {
        self.roots().next().is_some() || self.plus.min_value <= 0.0 || self.minus.min_value <= 0.0
    }

    /// Outermost root radius over both sheets, if any.
    pub fn outermost_root(&self) -> Option<f64> {
        self.roots().map(|root| root.r).fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
    }
}

/// Relative bisection tolerance for root refinement.
const ROOT_REL_TOL: f64 = 1e-14;

fn scan_sheet(data: &InitialData, sheet: Sheet) -> SheetScan {
    let grid = data.grid();
    let r = grid.r();
    let n = r.len();
    let start = usize::from(grid.domain() == Domain::Ball);
    let theta: Vec<f64> = r[start..].iter().map(|&x| expansion_at(data, sheet, x)).collect();

    let mut roots = Vec::new();
    let refine = |a: f64, b: f64| numerics::bisect(|x| expansion_at(data, sheet, x), a, b, ROOT_REL_TOL);

    // A negative first node on a ball means the root sits between the center
    // (where the expansion is +inf) and the first node.
    if start == 1 && theta[0] < 0.0 {
        let hi = r[1];
        let lo = hi * 1e-9;
        roots.push(HorizonRoot { sheet, r: refine(lo, hi), bracket: (0.0, hi), crossing: true });
    }

    for c in 0..theta.len() - 1 {
        let (a, b) = (theta[c], theta[c + 1]);
        let (ra, rb) = (r[start + c], r[start + c + 1]);
        if a == 0.0 {
            let prev = c.checked_sub(1).map(|p| theta[p]);
            let crossing = matches!(prev, Some(p) if p * b < 0.0);
            roots.push(HorizonRoot { sheet, r: ra, bracket: (ra, ra), crossing });
        } else if a * b < 0.0 {
            roots.push(HorizonRoot { sheet, r: refine(ra, rb), bracket: (ra, rb), crossing: true });
        }
    }
    if let Some(&last) = theta.last() {
        if last == 0.0 {
            let crossing = false;
            let rn = r[n - 1];
            roots.push(HorizonRoot { sheet, r: rn, bracket: (rn, rn), crossing });
        }
    }

    let (mut min_value, mut min_r) = (f64::INFINITY, r[start]);
    for (c, &v) in theta.iter().enumerate() {
        if v < min_value {
            min_value = v;
            min_r = r[start + c];
        }
    }
    SheetScan { sheet, roots, min_value, min_r }
}

/// Scan both expansion sheets of a data set.
pub fn scan_horizons(data: &InitialData) -> HorizonReport {
    HorizonReport { plus: scan_sheet(data, Sheet::Plus), minus: scan_sheet(data, Sheet::Minus) }
}

/// Inclusive node-index ranges where the spheres are untrapped
/// (`θ₊ > 0` and `θ₋ > 0`) or trapped (both negative), staying one node
/// away from every detected root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIntervals {
    pub untrapped: Vec<(usize, usize)>,
    pub trapped: Vec<(usize, usize)>,
}

/// Classify the grid nodes by expansion signs.
pub fn classify_intervals(data: &InitialData, report: &HorizonReport) -> NodeIntervals {
    let grid = data.grid();
    let r = grid.r();
    let n = r.len();
    let ball = grid.domain() == Domain::Ball;
    let mut untrapped = vec![false; n];
    let mut trapped = vec![false; n];
    for i in 0..n {
        if i == 0 && ball {
            // spheres near a regular center are always untrapped
            untrapped[0] = true;
            continue;
        }
        let tp = expansion_at(data, Sheet::Plus, r[i]);
        let tm = expansion_at(data, Sheet::Minus, r[i]);
        untrapped[i] = tp > 0.0 && tm > 0.0;
        trapped[i] = tp < 0.0 && tm < 0.0;
    }
    // keep one node of clearance around every root
    for root in report.roots() {
        for i in 0..n {
            let near = (i > 0 && r[i - 1] <= root.r && root.r <= r[i])
                || (i + 1 < n && r[i] <= root.r && root.r <= r[i + 1]);
            if near {
                untrapped[i] = false;
                trapped[i] = false;
            }
        }
    }
    NodeIntervals { untrapped: runs(&untrapped), trapped: runs(&trapped) }
}

/// Maximal runs of `true`, as inclusive index ranges.
fn runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &m) in mask.iter().enumerate() {
        match (m, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        out.push((s, mask.len() - 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics;
    use crate::radial_data::{build_family, Domain, FamilySpec, RadialGrid};
    use approx::assert_relative_eq;

    fn ball(n: usize, r_max: f64) -> RadialGrid {
        RadialGrid::uniform(0.0, r_max, n, Domain::Ball).unwrap()
    }

    fn annulus(r0: f64, r1: f64, n: usize) -> RadialGrid {
        RadialGrid::uniform(r0, r1, n, Domain::Annulus).unwrap()
    }

    #[test]
    fn flat_slicing_future_root_is_at_two_m() {
        let data = build_family(&FamilySpec::PainleveGullstrand { m: 1.0 }, annulus(0.5, 10.0, 97)).unwrap();
        let report = scan_horizons(&data);
        assert_eq!(report.plus.roots.len(), 1);
        assert_relative_eq!(report.plus.roots[0].r, 2.0, max_relative = 1e-12);
        assert!(report.plus.roots[0].crossing);
        assert!(report.minus.roots.is_empty());
        assert!(report.minus.min_value > 0.0);
        assert!(report.contains_horizon());
        assert_relative_eq!(report.outermost_root().unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn tabulated_flat_slicing_root_converges_at_second_order() {
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for n in [129usize, 257, 513] {
            let data = build_family(&FamilySpec::PainleveGullstrand { m: 1.0 }, annulus(0.5, 10.0, n))
                .unwrap()
                .tabulate();
            let report = scan_horizons(&data);
            assert_eq!(report.plus.roots.len(), 1, "n = {n}");
            errs.push((report.plus.roots[0].r - 2.0).abs());
            hs.push(9.5 / (n - 1) as f64);
        }
        let q = numerics::fit_order(&hs, &errs, 1e-13);
        assert!(q > 1.9, "root convergence order {q} (errors {errs:?})");
    }

    #[test]
    fn flat_space_and_star_have_no_horizons() {
        for (spec, grid) in [
            (FamilySpec::Minkowski, ball(64, 2.0)),
            (
                FamilySpec::ConstantDensityStar { mu0: 3.0 / (800.0 * std::f64::consts::PI), r_star: 5.0 },
                ball(64, 8.0),
            ),
            (FamilySpec::SchwarzschildTs { m: 1.0 }, annulus(2.5, 10.0, 64)),
        ] {
            let data = build_family(&spec, grid).unwrap();
            let report = scan_horizons(&data);
            assert!(!report.contains_horizon(), "{spec:?}");
            assert!(report.outermost_root().is_none());
        }
    }

    #[test]
    fn collapsing_slice_future_root_sits_at_inverse_k0() {
        let data = build_family(&FamilySpec::UniformCollapse { k0: 2.0, beta: 2.9, scale: 1.0 }, ball(65, 1.0)).unwrap();
        let report = scan_horizons(&data);
        assert_eq!(report.plus.roots.len(), 1);
        assert_relative_eq!(report.plus.roots[0].r, 0.5, max_relative = 1e-12);
        assert!(report.minus.roots.is_empty(), "theta_minus = 2/r + 2 k0 stays positive");
        assert!(report.contains_horizon());
    }

    #[test]
    fn root_inside_the_first_cell_is_found() {
        // theta_plus = 2/r - 2 k0 crosses at r = 0.05, inside cell (0, 0.0625)
        let data = build_family(&FamilySpec::UniformCollapse { k0: 20.0, beta: 0.0, scale: 1.0 }, ball(17, 1.0)).unwrap();
        let report = scan_horizons(&data);
        assert!(!report.plus.roots.is_empty());
        assert_relative_eq!(report.plus.roots[0].r, 0.05, max_relative = 1e-10);
    }

    #[test]
    fn interval_classification_keeps_clear_of_roots() {
        let data = build_family(&FamilySpec::PainleveGullstrand { m: 1.0 }, annulus(0.5, 10.0, 97)).unwrap();
        let report = scan_horizons(&data);
        let intervals = classify_intervals(&data, &report);
        assert!(intervals.trapped.is_empty(), "theta_minus > 0 everywhere: nothing is doubly trapped");
        assert_eq!(intervals.untrapped.len(), 1);
        let (lo, hi) = intervals.untrapped[0];
        assert_eq!(hi, 96);
        let r = data.grid().r();
        assert!(r[lo] > 2.0, "untrapped run must start beyond the root");
        assert!(r[lo - 1] >= 2.0 || r[lo] - 2.0 >= r[lo] - r[lo - 1], "one node of clearance");
    }

    #[test]
    fn flat_space_is_untrapped_everywhere() {
        let data = build_family(&FamilySpec::Minkowski, ball(64, 2.0)).unwrap();
        let report = scan_horizons(&data);
        let intervals = classify_intervals(&data, &report);
        assert_eq!(intervals.untrapped, vec![(0, 63)]);
        assert!(intervals.trapped.is_empty());
    }
}
