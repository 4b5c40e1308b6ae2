use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Self {
        let n = table.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .expect("multiplication table has an identity");
        FiniteGroup { table, identity }
    }

    /// Builds the table of a finite list of elements closed under `mul`.
    pub fn from_elements<E>(elems: &[E], mul: impl Fn(&E, &E) -> E, find: impl Fn(&E) -> Option<usize>) -> Self {
        let table = elems
            .iter()
            .map(|a| elems.iter().map(|b| find(&mul(a, b)).expect("element set is closed")).collect())
            .collect();
        Self::from_table(table)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity).expect("group elements are invertible")
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][a];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order()).any(|a| self.element_order(a) == self.order())
    }

    /// Subgroup generated by the given elements, as a sorted list.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.table[x][g];
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    pub fn derived_subgroup_order(&self) -> usize {
        let n = self.order();
        let mut comms = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let c = self.mul(self.mul(a, b), self.mul(self.inverse(a), self.inverse(b)));
                if !comms.contains(&c) {
                    comms.push(c);
                }
            }
        }
        self.generated(&comms).len()
    }

    /// Multiset of element orders, as order ↦ count.
    pub fn order_statistics(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for a in 0..self.order() {
            *m.entry(self.element_order(a)).or_insert(0) += 1;
        }
        m
    }

    /// Invariant factors of an abelian group, read off from element orders.
    pub fn abelian_invariants(&self) -> Vec<u64> {
        assert!(self.is_abelian());
        let orders: Vec<u64> = (0..self.order()).map(|a| self.element_order(a) as u64).collect();
        let mut prime_powers = Vec::new();
        for p in primes_dividing(self.order() as u64) {
            // s_k = log_p #{x : x^{p^k} = 1}
            let mut s = vec![0u32];
            let mut pk = 1u64;
            let mut part = 1u64;
            while (self.order() as u64) % (part * p) == 0 {
                part *= p;
            }
            loop {
                pk *= p;
                let count = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                let sk = ilog(count, p);
                s.push(sk);
                if count == part {
                    break;
                }
            }
            // number of cyclic factors of order ≥ p^k is s_k − s_{k−1}
            let at_least: Vec<u32> = (1..s.len()).map(|k| s[k] - s[k - 1]).collect();
            for k in 1..=at_least.len() {
                let exactly = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
                for _ in 0..exactly {
                    prime_powers.push(p.pow(k as u32));
                }
            }
        }
        invariant_factors(&prime_powers)
    }

    pub fn label(&self) -> Result<GroupLabel, UnrecognizedGroup> {
        if self.is_abelian() {
            return Ok(GroupLabel::Abelian(self.abelian_invariants()));
        }
        let print = (self.order(), self.derived_subgroup_order(), self.order_statistics());
        GroupLabel::catalogue()
            .into_iter()
            .find(|(_, fp)| *fp == print)
            .map(|(l, _)| l)
            .ok_or_else(|| UnrecognizedGroup(format!("order {} derived {} orders {:?}", print.0, print.1, print.2)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("finite group matches no catalogued label: {0}")]
pub struct UnrecognizedGroup(pub String);

fn primes_dividing(mut n: u64) -> Vec<u64> {
    let mut ps = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            ps.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    ps
}

fn ilog(mut x: u64, p: u64) -> u32 {
    let mut k = 0;
    while x > 1 {
        debug_assert_eq!(x % p, 0);
        x /= p;
        k += 1;
    }
    k
}

/// Invariant factors `d₁ | d₂ | …` (all > 1) of a product of cyclic groups of the given orders.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &o in orders {
        let mut n = o;
        for p in primes_dividing(o) {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            by_prime.entry(p).or_default().push(q);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in powers.iter().enumerate() {
            out[len - 1 - i] *= q;
        }
    }
    debug_assert!(out.windows(2).all(|w| w[1] % w[0] == 0));
    out.into_iter().filter(|&d| d > 1).collect()
}

/// Isomorphism-type labels for the holonomy and structure groups that occur.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupLabel {
    /// Invariant factors, each dividing the next.
    Abelian(Vec<u64>),
    /// Dihedral group of order `2n`, `n ≥ 3`.
    Dihedral(u64),
    A4,
    C2xA4,
}

type Fingerprint = (usize, usize, BTreeMap<usize, usize>);

impl GroupLabel {
    pub fn order(&self) -> u64 {
        match self {
            GroupLabel::Abelian(d) => d.iter().product(),
            GroupLabel::Dihedral(n) => 2 * n,
            GroupLabel::A4 => 12,
            GroupLabel::C2xA4 => 24,
        }
    }

    pub fn cyclic(n: u64) -> Self {
        GroupLabel::Abelian(invariant_factors(&[n]))
    }

    /// Abstract dihedral group of order `2n` (D₁ = C₂, D₂ = C₂²).
    pub fn dihedral(n: u64) -> Self {
        match n {
            1 => GroupLabel::cyclic(2),
            2 => GroupLabel::Abelian(vec![2, 2]),
            _ => GroupLabel::Dihedral(n),
        }
    }

    fn catalogue() -> Vec<(GroupLabel, Fingerprint)> {
        let fp = |order, derived, stats: &[(usize, usize)]| (order, derived, stats.iter().copied().collect());
        vec![
            (GroupLabel::Dihedral(3), fp(6, 3, &[(1, 1), (2, 3), (3, 2)])),
            (GroupLabel::Dihedral(4), fp(8, 2, &[(1, 1), (2, 5), (4, 2)])),
            (GroupLabel::Dihedral(6), fp(12, 3, &[(1, 1), (2, 7), (3, 2), (6, 2)])),
            (GroupLabel::A4, fp(12, 4, &[(1, 1), (2, 3), (3, 8)])),
            (GroupLabel::C2xA4, fp(24, 4, &[(1, 1), (2, 7), (3, 8), (6, 8)])),
        ]
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupLabel::Abelian(d) if d.is_empty() => write!(f, "C1"),
            GroupLabel::Abelian(d) if d.iter().all(|&x| x == d[0]) && d.len() > 1 => write!(f, "C{}^{}", d[0], d.len()),
            GroupLabel::Abelian(d) => {
                let parts: Vec<String> = d.iter().map(|x| format!("C{x}")).collect();
                write!(f, "{}", parts.join("x"))
            }
            GroupLabel::Dihedral(n) => write!(f, "D{n}"),
            GroupLabel::A4 => write!(f, "A4"),
            GroupLabel::C2xA4 => write!(f, "C2xA4"),
        }
    }
}

impl FromStr for GroupLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "A4" => return Ok(GroupLabel::A4),
            "C2xA4" => return Ok(GroupLabel::C2xA4),
            _ => {}
        }
        if let Some(n) = s.strip_prefix('D') {
            let n: u64 = n.parse().map_err(|_| format!("bad dihedral label {s}"))?;
            return Ok(GroupLabel::dihedral(n));
        }
        let mut orders = Vec::new();
        for part in s.split('x') {
            let body = part.strip_prefix('C').ok_or_else(|| format!("bad group label {s}"))?;
            let (base, exp) = match body.split_once('^') {
                Some((b, e)) => (b, e.parse::<usize>().map_err(|_| format!("bad exponent in {s}"))?),
                None => (body, 1),
            };
            let n: u64 = base.parse().map_err(|_| format!("bad cyclic order in {s}"))?;
            orders.extend(std::iter::repeat(n).take(exp));
        }
        Ok(GroupLabel::Abelian(invariant_factors(&orders)))
    }
}

pub fn lcm_all(v: &[u64]) -> u64 {
    v.iter().fold(1, |a, &b| a.lcm(&b))
}
