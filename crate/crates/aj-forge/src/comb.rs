//! Enumeration of the multinomial index sets behind the substitution
//! law and every solution recurrence.
//!
//! The base family is
//!
//! ```text
//! U_{n,i} = { u in Z_{>=0}^n : sum u_j = i,  sum j*u_j = n },
//! B_u = i! / prod u_j!
//! ```
//!
//! so that `(b_1 x + b_2 x^2 + ...)^i` has coefficient
//! `sum_{u in U_{n,i}} B_u prod b_j^{u_j}` at `x^n`. The restricted
//! variants zero out blocks of positions; with `N_l = { j : j ≡ 1 mod l }`:
//!
//! * `Hat(l)`   — u_j = 0 for j in |2,l| ∪ |n−i+2,n|;
//! * `Mod(l)`   — u_j = 0 for j in (|2,n−i+1| \ N_l) ∪ |n−i+2,n|;
//! * `Bar(l)`   — u_j = 0 for j in |2,l| ∪ |n−i+1,n|;
//! * `Check(l)` — Mod(l) ∩ Bar(l);
//! * `Tilde(l)` — Check(l) when i = l+1, Mod(l) when i = 2l+1, empty
//!   otherwise (the family is only ever used at those two values of i,
//!   and this is the variant for which the emptiness property
//!   `n ≢ 1 mod l  ⇒  Tilde empty` actually holds).

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::One;

/// Which restricted family to enumerate. The `u32` parameter is `l ≥ 1`
/// (the superscript in the family name is `l + 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Selector {
    /// Unrestricted U_{n,i}.
    Full,
    Hat(u32),
    Bar(u32),
    Tilde(u32),
    Check(u32),
    Mod(u32),
}

/// One index vector `u` together with its multinomial weight.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexVector {
    pub n: u32,
    pub i: u32,
    /// entries[j - 1] = u_j for j in 1..=n
    pub entries: Vec<u32>,
    /// B = i! / prod u_j!
    pub weight: BigInt,
}

impl IndexVector {
    pub fn u(&self, j: u32) -> u32 {
        self.entries[(j - 1) as usize]
    }
}

pub fn multinomial_weight(i: u32, entries: &[u32]) -> BigInt {
    let mut b = factorial(i);
    for &u in entries {
        if u > 1 {
            b /= factorial(u);
        }
    }
    b
}

fn factorial(n: u32) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n as u64 {
        f *= k;
    }
    f
}

fn in_nl(j: u32, l: u32) -> bool {
    j % l == 1 % l
}

/// Whether position `j` may carry a nonzero entry under the selector.
fn allowed(sel: Selector, n: u32, i: u32, j: u32) -> bool {
    let hat = |l: u32| !(2..=l).contains(&j) && !(n - i + 2..=n).contains(&j);
    let bar = |l: u32| !(2..=l).contains(&j) && !(n - i + 1..=n).contains(&j);
    let modl = |l: u32| hat(l) && !((2..=n - i + 1).contains(&j) && !in_nl(j, l));
    match sel {
        Selector::Full => true,
        Selector::Hat(l) => hat(l),
        Selector::Bar(l) => bar(l),
        Selector::Mod(l) => modl(l),
        Selector::Check(l) => modl(l) && bar(l),
        Selector::Tilde(l) => {
            if i == l + 1 {
                modl(l) && bar(l)
            } else if i == 2 * l + 1 {
                modl(l)
            } else {
                false
            }
        }
    }
}

/// Complete, duplicate-free enumeration of the selected family, with
/// exact weights. Results are memoized per thread; the returned `Rc` is
/// shared with the cache.
pub fn enumerate(n: u32, i: u32, sel: Selector) -> Rc<Vec<IndexVector>> {
    thread_local! {
        static CACHE: RefCell<HashMap<(u32, u32, Selector), Rc<Vec<IndexVector>>>> =
            RefCell::new(HashMap::new());
    }
    CACHE.with(|c| {
        if let Some(hit) = c.borrow().get(&(n, i, sel)) {
            return Rc::clone(hit);
        }
        let out = Rc::new(enumerate_uncached(n, i, sel));
        c.borrow_mut().insert((n, i, sel), Rc::clone(&out));
        out
    })
}

fn enumerate_uncached(n: u32, i: u32, sel: Selector) -> Vec<IndexVector> {
    assert!(n >= 1 && i >= 1 && i <= n);
    if let Selector::Tilde(l) = sel {
        if i != l + 1 && i != 2 * l + 1 {
            return Vec::new();
        }
    }
    let positions: Vec<u32> = (1..=n).filter(|&j| allowed(sel, n, i, j)).collect();
    let mut out = Vec::new();
    let mut entries = vec![0u32; n as usize];
    // walk allowed positions from the largest down, spending the sum
    // budget i and the weighted budget n
    dfs(&positions, positions.len(), i, n, &mut entries, &mut out, n, i);
    out
}

fn dfs(
    positions: &[u32],
    k: usize,
    rem_count: u32,
    rem_weight: u32,
    entries: &mut Vec<u32>,
    out: &mut Vec<IndexVector>,
    n: u32,
    i: u32,
) {
    if rem_weight < rem_count {
        return; // every remaining unit costs at least 1
    }
    if k == 0 {
        if rem_count == 0 && rem_weight == 0 {
            out.push(IndexVector {
                n,
                i,
                entries: entries.clone(),
                weight: multinomial_weight(i, entries),
            });
        }
        return;
    }
    let j = positions[k - 1];
    // the largest remaining position must be able to absorb the excess
    // weight over a pure run of 1's; positions are sorted ascending, so
    // j is the maximum among the first k
    if rem_weight > rem_count * j {
        return;
    }
    let max_u = (rem_weight / j).min(rem_count);
    for u in 0..=max_u {
        entries[(j - 1) as usize] = u;
        dfs(
            positions,
            k - 1,
            rem_count - u,
            rem_weight - j * u,
            entries,
            out,
            n,
            i,
        );
    }
    entries[(j - 1) as usize] = 0;
}

/// Reference implementation: walk every composition of i into n
/// non-negative parts (no weighted-sum pruning) and filter against the
/// defining constraints afterwards. Used only by tests to validate
/// [`enumerate`].
pub fn enumerate_brute_force(n: u32, i: u32, sel: Selector) -> Vec<IndexVector> {
    if let Selector::Tilde(l) = sel {
        if i != l + 1 && i != 2 * l + 1 {
            return Vec::new();
        }
    }
    let mut out = Vec::new();
    let mut entries = vec![0u32; n as usize];
    fn rec(
        j: u32,
        left: u32,
        entries: &mut Vec<u32>,
        out: &mut Vec<IndexVector>,
        n: u32,
        i: u32,
        sel: Selector,
    ) {
        if j > n {
            if left != 0 {
                return;
            }
            let weight: u32 = entries
                .iter()
                .enumerate()
                .map(|(idx, &u)| (idx as u32 + 1) * u)
                .sum();
            let masked = entries
                .iter()
                .enumerate()
                .all(|(idx, &u)| u == 0 || allowed(sel, n, i, idx as u32 + 1));
            if weight == n && masked {
                out.push(IndexVector {
                    n,
                    i,
                    entries: entries.clone(),
                    weight: multinomial_weight(i, entries),
                });
            }
            return;
        }
        for u in 0..=left {
            entries[(j - 1) as usize] = u;
            rec(j + 1, left - u, entries, out, n, i, sel);
        }
        entries[(j - 1) as usize] = 0;
    }
    rec(1, i, &mut entries, &mut out, n, i, sel);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn as_set(vs: &[IndexVector]) -> BTreeSet<Vec<u32>> {
        vs.iter().map(|v| v.entries.clone()).collect()
    }

    fn vector(n: u32, pairs: &[(u32, u32)]) -> Vec<u32> {
        let mut e = vec![0u32; n as usize];
        for &(j, u) in pairs {
            e[(j - 1) as usize] = u;
        }
        e
    }

    #[test]
    fn base_examples() {
        // U_{4,2} = {(1,0,1,0), (0,2,0,0)} with weights 2 and 1
        let fam = enumerate(4, 2, Selector::Full);
        assert_eq!(fam.len(), 2);
        for v in fam.iter() {
            if v.entries == vec![1, 0, 1, 0] {
                assert_eq!(v.weight, BigInt::from(2));
            } else {
                assert_eq!(v.entries, vec![0, 2, 0, 0]);
                assert_eq!(v.weight, BigInt::from(1));
            }
        }
        // U_{5,5} = {(5,0,0,0,0)}
        let fam = enumerate(5, 5, Selector::Full);
        assert_eq!(as_set(&fam), BTreeSet::from([vector(5, &[(1, 5)])]));
    }

    #[test]
    fn extremal_index_sets() {
        // U_{n,1} and U_{n,n} are singletons of weight 1
        for n in 2..=12 {
            let lo = enumerate(n, 1, Selector::Full);
            assert_eq!(as_set(&lo), BTreeSet::from([vector(n, &[(n, 1)])]));
            assert_eq!(lo[0].weight, BigInt::one());
            let hi = enumerate(n, n, Selector::Full);
            assert_eq!(as_set(&hi), BTreeSet::from([vector(n, &[(1, n)])]));
            assert_eq!(hi[0].weight, BigInt::one());
        }
    }

    #[test]
    fn tail_positions_vanish() {
        // for i >= 2 every u in U_{n,i} has u_j = 0 for j > n - i + 1
        for n in 3..=12u32 {
            for i in 2..=n {
                for v in enumerate(n, i, Selector::Full).iter() {
                    for j in n - i + 2..=n {
                        assert_eq!(v.u(j), 0, "n={n} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn near_top_closed_forms() {
        for n in 3..=12u32 {
            let fam = enumerate(n, n - 1, Selector::Full);
            assert_eq!(as_set(&fam), BTreeSet::from([vector(n, &[(1, n - 2), (2, 1)])]));
            assert_eq!(fam[0].weight, BigInt::from(n - 1));
        }
        for n in 4..=12u32 {
            let fam = enumerate(n, n - 2, Selector::Full);
            assert_eq!(
                as_set(&fam),
                BTreeSet::from([
                    vector(n, &[(1, n - 4), (2, 2)]),
                    vector(n, &[(1, n - 3), (3, 1)]),
                ])
            );
            for v in fam.iter() {
                if v.u(2) == 2 {
                    assert_eq!(v.weight, BigInt::from((n - 3) * (n - 2) / 2));
                } else {
                    assert_eq!(v.weight, BigInt::from(n - 2));
                }
            }
        }
    }

    #[test]
    fn middle_vectors_use_higher_positions() {
        // i - u_1 >= 1 for 2 <= i <= n-1
        for n in 4..=12u32 {
            for i in 2..=n - 1 {
                for v in enumerate(n, i, Selector::Full).iter() {
                    assert!(v.i - v.u(1) >= 1, "n={n} i={i} u={:?}", v.entries);
                }
            }
        }
    }

    #[test]
    fn l1_restrictions_are_trivial() {
        // Hat(1) and Mod(1) impose nothing
        for n in 3..=10u32 {
            for i in 1..=n {
                let base = as_set(&enumerate(n, i, Selector::Full));
                assert_eq!(as_set(&enumerate(n, i, Selector::Hat(1))), base);
                assert_eq!(as_set(&enumerate(n, i, Selector::Mod(1))), base);
            }
        }
    }

    #[test]
    fn hat_splits_off_one_singleton() {
        // for i in |2, n-l|: Hat = {(i-1, 0,..,1 at n-i+1,..)} ∪ Bar,
        // and the singleton has weight i
        for l in 1..=4u32 {
            for n in l + 2..=12 {
                for i in 2..=n - l {
                    let hat = enumerate(n, i, Selector::Hat(l));
                    let bar = enumerate(n, i, Selector::Bar(l));
                    let special = vector(n, &[(1, i - 1), (n - i + 1, 1)]);
                    let mut expect = as_set(&bar);
                    expect.insert(special.clone());
                    assert_eq!(as_set(&hat), expect, "l={l} n={n} i={i}");
                    let sv = hat.iter().find(|v| v.entries == special).unwrap();
                    assert_eq!(sv.weight, BigInt::from(i));
                }
            }
        }
    }

    #[test]
    fn hat_is_empty_near_the_top() {
        for l in 1..=4u32 {
            for n in l + 2..=12 {
                for i in n - l + 1..=n - 1 {
                    assert!(enumerate(n, i, Selector::Hat(l)).is_empty());
                    assert!(enumerate(n, i, Selector::Mod(l)).is_empty());
                }
            }
        }
    }

    #[test]
    fn tilde_vanishes_off_the_progression() {
        for l in 2..=4u32 {
            for n in l + 2..=14 {
                if n % l == 1 {
                    continue;
                }
                for i in [l + 1, 2 * l + 1] {
                    if i > n {
                        continue;
                    }
                    assert!(
                        enumerate(n, i, Selector::Tilde(l)).is_empty(),
                        "l={l} n={n} i={i}"
                    );
                }
            }
        }
    }

    #[test]
    fn tilde_singletons_at_3l_plus_1() {
        for l in 2..=4u32 {
            let n = 3 * l + 1;
            let fam = enumerate(n, l + 1, Selector::Tilde(l));
            assert_eq!(
                as_set(&fam),
                BTreeSet::from([vector(n, &[(1, l - 1), (l + 1, 2)])])
            );
            let fam = enumerate(n, 2 * l + 1, Selector::Tilde(l));
            assert_eq!(
                as_set(&fam),
                BTreeSet::from([vector(n, &[(1, 2 * l), (l + 1, 1)])])
            );
        }
    }

    #[test]
    fn matches_brute_force() {
        for n in 1..=10u32 {
            for i in 1..=n {
                let mut selectors = vec![Selector::Full];
                for l in 1..=4 {
                    selectors.extend([
                        Selector::Hat(l),
                        Selector::Bar(l),
                        Selector::Tilde(l),
                        Selector::Check(l),
                        Selector::Mod(l),
                    ]);
                }
                for sel in selectors {
                    let fast = enumerate(n, i, sel);
                    let slow = enumerate_brute_force(n, i, sel);
                    assert_eq!(as_set(&fast), as_set(&slow), "n={n} i={i} {sel:?}");
                    assert_eq!(fast.len(), slow.len());
                    for v in fast.iter() {
                        assert_eq!(v.weight, multinomial_weight(i, &v.entries));
                        let count: u32 = v.entries.iter().sum();
                        let weight: u32 = v
                            .entries
                            .iter()
                            .enumerate()
                            .map(|(idx, &u)| (idx as u32 + 1) * u)
                            .sum();
                        assert_eq!((count, weight), (i, n));
                    }
                }
            }
        }
    }

    #[test]
    fn weights_use_big_integers() {
        // i = 22 overflows u64 factorial; B must still be exact
        let fam = enumerate(22, 22, Selector::Full);
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].weight, BigInt::one());
        let fam = enumerate(23, 22, Selector::Full);
        assert_eq!(fam[0].weight, BigInt::from(22));
    }
}
