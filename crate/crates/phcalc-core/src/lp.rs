//! Exact maximization of min-of-affine families over unit-sphere faces.
//!
//! The sup norm of a max-min normal form over the unit sphere of the sup norm
//! is a finite exact computation: the sphere is the union of the 2n cube
//! faces, each face is a box of dimension n-1, and on a face every linear
//! form restricts to an affine function. Maximizing `min_i (a_i . v + b_i)`
//! over a box is a tiny linear program, solved here with an exact rational
//! two-phase simplex (Bland's rule, so it terminates). Dimension one gets a
//! direct candidate-point evaluation instead, which is much faster and covers
//! the bulk of real calls (n = 2).
//!
//! On top of that primitive sit the exact dominance checks used to prune
//! normal forms: a clause is dropped only when another clause is proven
//! pointwise greater-or-equal on every face.

use crate::error::{Error, Result};
use crate::nf::{LinearForm, MaxMinNF, NormalizeOptions};
use crate::rat::{rat_int, rat_zero, Rat};
use num_traits::{Signed, Zero};

/// Max over the face `{u : u_d = sign, |u_j| <= 1}` of `min_i forms[i](u)`.
pub fn face_max_min(forms: &[&LinearForm], arity: usize, d: usize, sign: i8) -> Rat {
    debug_assert!(!forms.is_empty());
    let sgn = rat_int(sign as i64);
    // restrict: affine in the free coordinates, constant from the pinned one
    let free: Vec<usize> = (0..arity).filter(|&j| j != d).collect();
    let consts: Vec<Rat> = forms.iter().map(|f| &f.coeffs[d] * &sgn).collect();
    match free.len() {
        0 => consts.into_iter().min().unwrap(),
        1 => {
            let j = free[0];
            let lines: Vec<(Rat, Rat)> = forms
                .iter()
                .zip(consts)
                .map(|(f, b)| (f.coeffs[j].clone(), b))
                .collect();
            max_min_lines(&lines)
        }
        k => {
            let rows: Vec<(Vec<Rat>, Rat)> = forms
                .iter()
                .zip(consts)
                .map(|(f, b)| (free.iter().map(|&j| f.coeffs[j].clone()).collect(), b))
                .collect();
            max_min_box(&rows, k)
        }
    }
}

/// Max over y in [-1, 1] of `min_i (a_i y + b_i)`: the upper point of a
/// concave piecewise linear envelope, always attained at an endpoint or at an
/// intersection of two of the lines.
fn max_min_lines(lines: &[(Rat, Rat)]) -> Rat {
    let one = rat_int(1);
    let eval = |y: &Rat| -> Rat {
        lines
            .iter()
            .map(|(a, b)| a * y + b)
            .min()
            .unwrap()
    };
    let mut best = eval(&-one.clone()).max(eval(&one));
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            let (a1, b1) = &lines[i];
            let (a2, b2) = &lines[j];
            if a1 == a2 {
                continue;
            }
            let y = (b2 - b1) / (a1 - a2);
            if y.abs() <= one {
                let v = eval(&y);
                if v > best {
                    best = v;
                }
            }
        }
    }
    best
}

/// Max over v in [-1,1]^k of `min_i (a_i . v + b_i)` via an exact simplex.
fn max_min_box(rows: &[(Vec<Rat>, Rat)], k: usize) -> Rat {
    // variables: w_1..w_k in [0, 2] with v = w - 1, and z = z1 - z2 (z1, z2 >= 0)
    // maximize z  subject to  z - a_i . w <= b_i - sum_j a_ij,  w_j <= 2
    let nvars = k + 2;
    let mut a = Vec::with_capacity(rows.len() + k);
    let mut b = Vec::with_capacity(rows.len() + k);
    for (coefs, c) in rows {
        let mut row = vec![rat_zero(); nvars];
        let mut shift = c.clone();
        for (j, aj) in coefs.iter().enumerate() {
            row[j] = -aj.clone();
            shift -= aj;
        }
        row[k] = rat_int(1);
        row[k + 1] = rat_int(-1);
        a.push(row);
        b.push(shift);
    }
    for j in 0..k {
        let mut row = vec![rat_zero(); nvars];
        row[j] = rat_int(1);
        a.push(row);
        b.push(rat_int(2));
    }
    let mut c = vec![rat_zero(); nvars];
    c[k] = rat_int(1);
    c[k + 1] = rat_int(-1);
    simplex_max(&a, &b, &c).expect("face LP is feasible and bounded")
}

/// Textbook two-phase primal simplex on `max c.x, Ax <= b, x >= 0`, exact
/// rationals, Bland's rule. Only the optimal value is returned.
fn simplex_max(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Result<Rat> {
    let m = a.len();
    let n = c.len();
    let nart = b.iter().filter(|bi| bi.is_negative()).count();
    let ncols = n + m + nart;
    let mut t = vec![vec![rat_zero(); ncols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut is_art = vec![false; ncols];
    let mut next_art = n + m;
    for i in 0..m {
        let neg = b[i].is_negative();
        for j in 0..n {
            t[i][j] = if neg { -a[i][j].clone() } else { a[i][j].clone() };
        }
        t[i][n + i] = rat_int(if neg { -1 } else { 1 });
        t[i][ncols] = b[i].abs();
        if neg {
            t[i][next_art] = rat_int(1);
            basis[i] = next_art;
            is_art[next_art] = true;
            next_art += 1;
        } else {
            basis[i] = n + i;
        }
    }

    if nart > 0 {
        let p1_cost: Vec<Rat> = (0..ncols)
            .map(|j| if is_art[j] { rat_int(-1) } else { rat_zero() })
            .collect();
        run_pivots(&mut t, &mut basis, &p1_cost, &is_art, false)?;
        let p1_val: Rat = basis
            .iter()
            .enumerate()
            .map(|(i, &bv)| &p1_cost[bv] * &t[i][ncols])
            .sum();
        if p1_val.is_negative() {
            return Err(Error::Unsupported("infeasible linear program".into()));
        }
        // pivot leftover artificials out of the basis, or drop redundant rows
        let mut drop_rows = Vec::new();
        for i in 0..m {
            if is_art[basis[i]] {
                match (0..n + m).find(|&j| !t[i][j].is_zero()) {
                    Some(j) => pivot(&mut t, &mut basis, i, j),
                    None => drop_rows.push(i),
                }
            }
        }
        for &i in drop_rows.iter().rev() {
            t.remove(i);
            basis.remove(i);
        }
    }

    let mut cost = vec![rat_zero(); ncols];
    cost[..n].clone_from_slice(c);
    run_pivots(&mut t, &mut basis, &cost, &is_art, true)?;
    Ok(basis
        .iter()
        .enumerate()
        .map(|(i, &bv)| &cost[bv] * &t[i][t[i].len() - 1])
        .sum())
}

fn run_pivots(
    t: &mut [Vec<Rat>],
    basis: &mut [usize],
    cost: &[Rat],
    is_art: &[bool],
    ban_art: bool,
) -> Result<()> {
    let m = t.len();
    if m == 0 {
        return Ok(());
    }
    let ncols = t[0].len() - 1;
    loop {
        // reduced costs d_j = c_j - c_B . column_j; Bland: first positive enters
        let mut entering = None;
        for j in 0..ncols {
            if (ban_art && is_art[j]) || basis.contains(&j) {
                continue;
            }
            let mut d = cost[j].clone();
            for i in 0..m {
                if !t[i][j].is_zero() && !cost[basis[i]].is_zero() {
                    d -= &cost[basis[i]] * &t[i][j];
                }
            }
            if d.is_positive() {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else { return Ok(()) };
        // ratio test, ties by smallest basis index (Bland)
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if t[i][j].is_positive() {
                let ratio = &t[i][ncols] / &t[i][j];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::Unsupported("unbounded linear program".into()));
        };
        pivot(t, basis, r, j);
    }
}

fn pivot(t: &mut [Vec<Rat>], basis: &mut [usize], r: usize, j: usize) {
    let piv = t[r][j].clone();
    for v in t[r].iter_mut() {
        *v /= &piv;
    }
    for i in 0..t.len() {
        if i == r || t[i][j].is_zero() {
            continue;
        }
        let f = t[i][j].clone();
        for col in 0..t[i].len() {
            let delta = &f * &t[r][col];
            t[i][col] -= delta;
        }
    }
    basis[r] = j;
}

// ---------------------------------------------------------------------------
// sup norms and dominance built on the face primitive

/// Exact supremum of a normal form over the unit sphere of the sup norm.
pub fn nf_sup(nf: &MaxMinNF) -> Rat {
    let n = nf.arity();
    let mut best: Option<Rat> = None;
    for clause in nf.clauses() {
        let forms: Vec<&LinearForm> = clause.iter().collect();
        for d in 0..n {
            for sign in [1i8, -1] {
                let v = face_max_min(&forms, n, d, sign);
                best = Some(match best {
                    None => v,
                    Some(cur) => cur.max(v),
                });
            }
        }
    }
    best.unwrap()
}

/// Exact sup of |f| over the sphere: `max(sup f, sup -f)`.
pub fn nf_abs_sup(nf: &MaxMinNF, budget: u64) -> Result<Rat> {
    let neg = nf.negate(budget)?;
    Ok(nf_sup(nf).max(nf_sup(&neg)))
}

/// Is `min over sub` pointwise <= `target` on the whole sphere?
fn min_dominated_by(sub: &[&LinearForm], target: &LinearForm, arity: usize) -> bool {
    // counterexample would be a sphere point where every (l' - target) > 0
    let diffs: Vec<LinearForm> = sub
        .iter()
        .map(|f| {
            LinearForm::new(
                f.coeffs
                    .iter()
                    .zip(&target.coeffs)
                    .map(|(a, b)| a - b)
                    .collect(),
            )
        })
        .collect();
    let refs: Vec<&LinearForm> = diffs.iter().collect();
    for d in 0..arity {
        for sign in [1i8, -1] {
            if face_max_min(&refs, arity, d, sign).is_positive() {
                return false;
            }
        }
    }
    true
}

/// `min C' >= min C` pointwise on the sphere?
fn clause_dominates(cp: &[LinearForm], c: &[LinearForm], arity: usize) -> bool {
    // fails iff some sphere point has min C > some form of C', i.e. for some
    // l' in C' every (l - l') > 0 is satisfiable
    cp.iter().all(|lp| {
        let sub: Vec<&LinearForm> = c.iter().collect();
        min_dominated_by(&sub, lp, arity)
    })
}

/// Deterministic sample of sphere points used to pre-screen dominance before
/// paying for an exact check.
fn screen_points(n: usize) -> Vec<Vec<f64>> {
    let grid: &[f64] = if n <= 4 {
        &[-1.0, -0.5, 0.0, 0.5, 1.0]
    } else {
        &[-1.0, 0.0, 1.0]
    };
    let mut pts = Vec::new();
    let k = n - 1;
    let mut idx = vec![0usize; k];
    for d in 0..n {
        for sign in [1.0f64, -1.0] {
            idx.iter_mut().for_each(|v| *v = 0);
            loop {
                let mut p = vec![0.0; n];
                p[d] = sign;
                let mut fi = 0;
                for j in 0..n {
                    if j != d {
                        p[j] = grid[idx[fi]];
                        fi += 1;
                    }
                }
                pts.push(p);
                let mut c = 0;
                loop {
                    if c == k {
                        break;
                    }
                    idx[c] += 1;
                    if idx[c] < grid.len() {
                        break;
                    }
                    idx[c] = 0;
                    c += 1;
                }
                if c == k {
                    break;
                }
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// Remove forms and clauses that are provably redundant. Bounded effort: runs
/// only under the size thresholds in `opts`; every removal is confirmed by an
/// exact face check, so the pruned form is pointwise equal to the input.
pub(crate) fn prune_dominated(nf: MaxMinNF, opts: &NormalizeOptions) -> MaxMinNF {
    let n = nf.arity();
    if nf.clause_count() > opts.lp_prune_max_clauses
        || nf.clauses().iter().any(|c| c.len() > opts.lp_prune_max_forms)
    {
        return nf;
    }
    let pts = screen_points(n);
    let tol = 1e-9;

    // pass 1: redundant forms inside each clause
    let mut clauses: Vec<Vec<LinearForm>> = Vec::with_capacity(nf.clause_count());
    for clause in nf.clauses() {
        let mut kept: Vec<LinearForm> = clause.clone();
        let mut i = kept.len();
        while i > 0 && kept.len() > 1 {
            i -= 1;
            let others: Vec<&LinearForm> = kept
                .iter()
                .enumerate()
                .filter_map(|(j, f)| (j != i).then_some(f))
                .collect();
            // screen: a point where min(others) clearly exceeds kept[i] proves relevance
            let relevant = pts.iter().any(|p| {
                let mo = others
                    .iter()
                    .map(|f| f.eval_f64(p))
                    .fold(f64::INFINITY, f64::min);
                mo > kept[i].eval_f64(p) + tol
            });
            if !relevant && min_dominated_by(&others, &kept[i], n) {
                kept.remove(i);
            }
        }
        clauses.push(kept);
    }

    // pass 2: clauses dominated by another clause
    let mins: Vec<Vec<f64>> = clauses
        .iter()
        .map(|c| {
            pts.iter()
                .map(|p| c.iter().map(|f| f.eval_f64(p)).fold(f64::INFINITY, f64::min))
                .collect()
        })
        .collect();
    let mut removed = vec![false; clauses.len()];
    for i in 0..clauses.len() {
        if removed[i] {
            continue;
        }
        for j in 0..clauses.len() {
            if i == j || removed[j] {
                continue;
            }
            // candidate: min_j >= min_i everywhere on the screen
            let maybe = mins[j]
                .iter()
                .zip(&mins[i])
                .all(|(mj, mi)| *mj >= mi - tol);
            if maybe && clause_dominates(&clauses[j], &clauses[i], n) {
                // mutual domination means pointwise equal clauses: keep j
                removed[i] = true;
                break;
            }
        }
    }
    let survivors: Vec<Vec<LinearForm>> = clauses
        .into_iter()
        .zip(&removed)
        .filter_map(|(c, r)| (!r).then_some(c))
        .collect();
    MaxMinNF::from_clauses(n, survivors).expect("pruning keeps at least one clause")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nf::normalize;
    use crate::rat::{rat, rat_to_f64};
    use crate::term::Term;

    #[test]
    fn sup_of_unit_term_is_one() {
        for n in 1..=4 {
            let t = Term::unit(n).unwrap();
            let nf = normalize(&t).unwrap();
            assert_eq!(nf_sup(&nf), rat_int(1), "n={n}");
        }
    }

    #[test]
    fn sup_of_coordinate() {
        let nf = MaxMinNF::coordinate(3, 2).unwrap();
        assert_eq!(nf_sup(&nf), rat_int(1));
        assert_eq!(nf_abs_sup(&nf, 1000).unwrap(), rat_int(1));
    }

    #[test]
    fn sup_of_sum_form() {
        // p1 + p2 on the square peaks at the corner (1,1)
        let t = Term::parse(2, "p1 + p2").unwrap();
        let nf = normalize(&t).unwrap();
        assert_eq!(nf_sup(&nf), rat_int(2));
    }

    #[test]
    fn sup_of_meet() {
        // p1 ^ p2 peaks at (1,1) with value 1
        let t = Term::parse(2, "p1 ^ p2").unwrap();
        let nf = normalize(&t).unwrap();
        assert_eq!(nf_sup(&nf), rat_int(1));
        // and |p1 ^ p2| reaches 1 as well
        assert_eq!(nf_abs_sup(&nf, 1000).unwrap(), rat_int(1));
    }

    #[test]
    fn sup_matches_brute_force_for_three_vars() {
        let t = Term::parse(3, "(p1 + 1/2 * p2) ^ (p3 - p1) v p2").unwrap();
        let nf = normalize(&t).unwrap();
        let sup = nf_sup(&nf);
        // dense rational grid stays below the exact sup
        let mut best = rat(-1000, 1);
        for i in -4..=4i64 {
            for j in -4..=4i64 {
                for d in 0..3 {
                    for s in [-1i64, 1] {
                        let mut x = vec![rat(i, 4), rat(j, 4), rat_int(0)];
                        x.rotate_right(d);
                        x[d] = rat_int(s);
                        let v = nf.eval(&x).unwrap();
                        if v > best {
                            best = v;
                        }
                    }
                }
            }
        }
        assert!(best <= sup);
        assert!(rat_to_f64(&(sup.clone() - best)) < 0.3, "grid too far from sup {sup}");
    }

    #[test]
    fn dominance_pruning_is_sound() {
        // (p1 v p2) ^ p1 = p1 exercised at the lp level
        let t = Term::parse(2, "(p1 v p2) ^ p1").unwrap();
        let nf = normalize(&t).unwrap();
        assert_eq!(nf.clause_count(), 1);
        assert_eq!(nf.clauses()[0].len(), 1);
    }
}
