//! Finite groups with symmetric generating sets.
//!
//! Elements are dense indices `0..order`; the multiplication table is stored
//! row-major so that `mul(a, b) = mult[a * order + b]`. Word lengths and
//! Cayley graphs use left multiplication `x ↦ s·x` by the generators.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::DEFAULT_ORDER_CAP;
use crate::error::{Error, Result};

/// How a group was built; used for labels and for choosing explicit
/// almost-invariant vectors on cyclic groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "param", rename_all = "lowercase")]
pub enum GroupKind {
    Trivial,
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Sl2(usize),
    Product(Box<GroupKind>, Box<GroupKind>),
    Custom,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Trivial => write!(f, "trivial"),
            GroupKind::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupKind::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupKind::Symmetric(n) => write!(f, "symmetric:{n}"),
            GroupKind::Sl2(p) => write!(f, "sl2:{p}"),
            GroupKind::Product(a, b) => write!(f, "prod:{a},{b}"),
            GroupKind::Custom => write!(f, "custom"),
        }
    }
}

/// A finite group with a symmetric generating set `S`.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    mult: Vec<u32>,
    inv: Vec<u32>,
    identity: usize,
    gens: Vec<usize>,
    kind: GroupKind,
}

/// On-disk form of a group: `{order, mult (row-major), gens}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mult: Vec<usize>,
    pub gens: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a multiplication table and generating set.
    pub fn from_table(order: usize, mult: Vec<usize>, gens: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(Error::input("group order must be positive"));
        }
        if order > DEFAULT_ORDER_CAP {
            return Err(Error::Resource {
                what: "group order".into(),
                needed: order,
                cap: DEFAULT_ORDER_CAP,
            });
        }
        if mult.len() != order * order {
            return Err(Error::input(format!(
                "multiplication table has {} entries, expected {}",
                mult.len(),
                order * order
            )));
        }
        if let Some(bad) = mult.iter().find(|&&x| x >= order) {
            return Err(Error::input(format!("table entry {bad} is not an element index")));
        }
        let mult: Vec<u32> = mult.into_iter().map(|x| x as u32).collect();
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mult[e * order + x] as usize == x && mult[x * order + e] as usize == x))
            .ok_or_else(|| Error::input("table has no two-sided identity"))?;
        let mut inv = vec![u32::MAX; order];
        for a in 0..order {
            let row = &mult[a * order..(a + 1) * order];
            let mut seen = vec![false; order];
            for &x in row {
                if std::mem::replace(&mut seen[x as usize], true) {
                    return Err(Error::input(format!("row {a} of the table is not a permutation")));
                }
            }
            let b = row.iter().position(|&x| x as usize == identity).unwrap();
            if mult[b * order + a] as usize != identity {
                return Err(Error::input(format!("element {a} has no two-sided inverse")));
            }
            inv[a] = b as u32;
        }
        let group = Self {
            order,
            mult,
            inv,
            identity,
            gens: vec![],
            kind: GroupKind::Custom,
        };
        group.check_associative()?;
        group.with_gens(gens, true)
    }

    pub fn from_file(file: GroupFile) -> Result<Self> {
        Self::from_table(file.order, file.mult, file.gens)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            order: self.order,
            mult: self.mult.iter().map(|&x| x as usize).collect(),
            gens: self.gens.clone(),
        }
    }

    fn with_gens(mut self, gens: Vec<usize>, require_generation: bool) -> Result<Self> {
        if let Some(bad) = gens.iter().find(|&&g| g >= self.order) {
            return Err(Error::input(format!("generator {bad} is not an element index")));
        }
        let mut gens_sorted = gens.clone();
        gens_sorted.sort_unstable();
        gens_sorted.dedup();
        if gens_sorted.len() != gens.len() {
            return Err(Error::input("generating set lists an element twice"));
        }
        if let Some(g) = gens.iter().find(|&&g| !gens.contains(&self.inv(g))) {
            return Err(Error::input(format!(
                "generating set is not symmetric: inverse of {g} missing"
            )));
        }
        self.gens = gens;
        if require_generation {
            self.word_lengths()?;
        }
        Ok(self)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.order;
        let triple_ok = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !triple_ok(a, b, c) {
                            return Err(Error::input(format!("table not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = crate::rng::seeded(0x9e37);
            for _ in 0..10_000 {
                let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                if !triple_ok(a, b, c) {
                    return Err(Error::input(format!("table not associative at ({a},{b},{c})")));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn label(&self) -> String {
        self.kind.to_string()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `g^k` for `k ≥ 0`.
    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(g, acc))
    }

    /// Order of the element `g`.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(g, x);
            k += 1;
        }
        k
    }

    fn bfs(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.order];
        dist[self.identity] = 0;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &s in &self.gens {
                let y = self.mul(s, x);
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Word length `l(x)` of every element.
    pub fn word_lengths(&self) -> Result<Vec<usize>> {
        let lengths = self.bfs();
        let missing: Vec<usize> = (0..self.order).filter(|&x| lengths[x] == usize::MAX).collect();
        if !missing.is_empty() {
            return Err(Error::input(format!(
                "generating set misses {} elements (first {:?})",
                missing.len(),
                &missing[..missing.len().min(5)]
            )));
        }
        Ok(lengths)
    }

    /// Whether `S` generates the whole group.
    pub fn generates(&self) -> bool {
        self.bfs().iter().all(|&d| d != usize::MAX)
    }

    /// Cayley graph adjacency: entry `(x, s·x)` is incremented for each `s ∈ S`.
    pub fn cayley_adjacency(&self) -> DMatrix<f64> {
        let n = self.order;
        let mut a = DMatrix::<f64>::zeros(n, n);
        for x in 0..n {
            for &s in &self.gens {
                a[(x, self.mul(s, x))] += 1.0;
            }
        }
        a
    }

    /// Left translation by `g` as a permutation: `perm[x] = g·x`.
    pub fn left_translation(&self, g: usize) -> Vec<usize> {
        (0..self.order).map(|x| self.mul(g, x)).collect()
    }
}

/// Closes `gens` under multiplication, interning elements in BFS order from
/// the identity, and builds the table.
fn closure<T: Clone + Eq + Hash>(
    identity: T,
    gens: &[T],
    mul: impl Fn(&T, &T) -> T,
    cap: usize,
    what: &str,
) -> Result<(Vec<u32>, Vec<usize>)> {
    let mut index: HashMap<T, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    index.insert(identity, 0);
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head].clone();
        head += 1;
        for g in gens {
            let y = mul(g, &x);
            if !index.contains_key(&y) {
                if elements.len() >= cap {
                    return Err(Error::Resource {
                        what: what.into(),
                        needed: cap + 1,
                        cap,
                    });
                }
                index.insert(y.clone(), elements.len());
                elements.push(y);
            }
        }
    }
    let n = elements.len();
    let mut mult = vec![0u32; n * n];
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            mult[i * n + j] = index[&mul(a, b)] as u32;
        }
    }
    let gen_idx = gens.iter().map(|g| index[g]).collect();
    Ok((mult, gen_idx))
}

fn inverses(order: usize, mult: &[u32], identity: usize) -> Vec<u32> {
    (0..order)
        .map(|a| {
            mult[a * order..(a + 1) * order]
                .iter()
                .position(|&x| x as usize == identity)
                .expect("group table row without identity") as u32
        })
        .collect()
}

fn assemble(order: usize, mult: Vec<u32>, gens: Vec<usize>, kind: GroupKind) -> FiniteGroup {
    let inv = inverses(order, &mult, 0);
    FiniteGroup {
        order,
        mult,
        inv,
        identity: 0,
        gens,
        kind,
    }
}

fn dedup_keep_order(v: Vec<usize>) -> Vec<usize> {
    let mut out = Vec::with_capacity(v.len());
    for x in v {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub fn trivial() -> FiniteGroup {
    assemble(1, vec![0], vec![], GroupKind::Trivial)
}

/// `ℤ/n` with `S = {+1, -1}`; element `i` is the residue `i`.
pub fn make_cyclic(n: usize) -> Result<FiniteGroup> {
    if n < 2 {
        return Err(Error::input(format!("cyclic group needs n >= 2, got {n}")));
    }
    check_cap(n, "cyclic group order")?;
    let mult = (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect();
    Ok(assemble(
        n,
        mult,
        dedup_keep_order(vec![1, n - 1]),
        GroupKind::Cyclic(n),
    ))
}

/// Dihedral group of order `2n`, `S = {r, r⁻¹, f}`; index `k + n·e` is `r^k f^e`.
pub fn make_dihedral(n: usize) -> Result<FiniteGroup> {
    if n < 3 {
        return Err(Error::input(format!("dihedral group needs n >= 3, got {n}")));
    }
    let order = 2 * n;
    check_cap(order, "dihedral group order")?;
    let mut mult = vec![0u32; order * order];
    for a in 0..order {
        let (k1, e1) = (a % n, a / n);
        for b in 0..order {
            let (k2, e2) = (b % n, b / n);
            let k = if e1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
            mult[a * order + b] = (k + n * (e1 ^ e2)) as u32;
        }
    }
    Ok(assemble(order, mult, vec![1, n - 1, n], GroupKind::Dihedral(n)))
}

/// Symmetric group on `n` letters, `S = {(0 1), c, c⁻¹}` with `c` the n-cycle.
pub fn make_symmetric(n: usize) -> Result<FiniteGroup> {
    if n < 3 {
        return Err(Error::input(format!("symmetric group needs n >= 3, got {n}")));
    }
    let order: usize = (1..=n).product();
    check_cap(order, "symmetric group order")?;
    let identity: Vec<u8> = (0..n as u8).collect();
    let mut swap = identity.clone();
    swap.swap(0, 1);
    let cycle: Vec<u8> = (0..n).map(|i| ((i + 1) % n) as u8).collect();
    let cycle_inv: Vec<u8> = (0..n).map(|i| ((i + n - 1) % n) as u8).collect();
    // (a∘b)(i) = a(b(i)).
    let compose = |a: &Vec<u8>, b: &Vec<u8>| -> Vec<u8> { b.iter().map(|&i| a[i as usize]).collect() };
    let (mult, gens) = closure(identity, &[swap, cycle, cycle_inv], compose, order, "symmetric group")?;
    Ok(assemble(order, mult, gens, GroupKind::Symmetric(n)))
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `SL₂(F_p)` with the four elementary generators `E₁₂(±1)`, `E₂₁(±1)`.
pub fn make_sl2(p: usize) -> Result<FiniteGroup> {
    if !is_prime(p) || !(3..=17).contains(&p) {
        return Err(Error::input(format!("sl2 needs a prime 3 <= p <= 17, got {p}")));
    }
    let order = p * (p * p - 1);
    check_cap(order, "sl2 group order")?;
    type M = [usize; 4];
    let mul = |a: &M, b: &M| -> M {
        [
            (a[0] * b[0] + a[1] * b[2]) % p,
            (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p,
            (a[2] * b[1] + a[3] * b[3]) % p,
        ]
    };
    let gens: [M; 4] = [[1, 1, 0, 1], [1, p - 1, 0, 1], [1, 0, 1, 1], [1, 0, p - 1, 1]];
    let (mult, gen_idx) = closure([1, 0, 0, 1], &gens, mul, order, "sl2 group")?;
    let n = (mult.len() as f64).sqrt().round() as usize;
    if n != order {
        return Err(Error::invariant(format!(
            "sl2({p}) closure has {n} elements, expected {order}"
        )));
    }
    Ok(assemble(order, mult, gen_idx, GroupKind::Sl2(p)))
}

/// Direct product with generating set `S_G × S_H`; index `g·|H| + h`.
pub fn make_product(g: &FiniteGroup, h: &FiniteGroup, cap: usize) -> Result<FiniteGroup> {
    let order = g.order * h.order;
    if order > cap {
        return Err(Error::Resource {
            what: format!("product {} x {}", g.label(), h.label()),
            needed: order,
            cap,
        });
    }
    let nh = h.order;
    let mut mult = vec![0u32; order * order];
    for a in 0..order {
        for b in 0..order {
            let x = g.mul(a / nh, b / nh);
            let y = h.mul(a % nh, b % nh);
            mult[a * order + b] = (x * nh + y) as u32;
        }
    }
    let mut gens = Vec::with_capacity(g.gens.len() * h.gens.len().max(1));
    let hg: Vec<usize> = if h.gens.is_empty() {
        vec![h.identity]
    } else {
        h.gens.clone()
    };
    let gg: Vec<usize> = if g.gens.is_empty() {
        vec![g.identity]
    } else {
        g.gens.clone()
    };
    for &s in &gg {
        for &t in &hg {
            gens.push(s * nh + t);
        }
    }
    let identity = g.identity * nh + h.identity;
    let mut gens: Vec<usize> = dedup_keep_order(gens);
    if g.gens.is_empty() && h.gens.is_empty() {
        gens.clear();
    }
    let inv = inverses(order, &mult, identity);
    let group = FiniteGroup {
        order,
        mult,
        inv,
        identity,
        gens: vec![],
        kind: GroupKind::Product(Box::new(g.kind.clone()), Box::new(h.kind.clone())),
    };
    // S_G × S_H need not generate G × H (for instance ℤ/2 × ℤ/2); the
    // Cayley graph is then disconnected and 1 is a repeated eigenvalue.
    group.with_gens(gens, false)
}

fn check_cap(order: usize, what: &str) -> Result<()> {
    if order > DEFAULT_ORDER_CAP {
        return Err(Error::Resource {
            what: what.into(),
            needed: order,
            cap: DEFAULT_ORDER_CAP,
        });
    }
    Ok(())
}

/// An ordered list of groups.
#[derive(Debug, Clone)]
pub struct GroupFamily {
    pub label: String,
    pub members: Vec<FiniteGroup>,
}

impl GroupFamily {
    pub fn new(label: impl Into<String>, members: Vec<FiniteGroup>) -> Self {
        Self {
            label: label.into(),
            members,
        }
    }

    /// `max_n |S_n|`.
    pub fn max_gens(&self) -> usize {
        self.members.iter().map(|g| g.gens.len()).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Parses a family spec such as `cyclic:10..100:10`, `sl2:3,5,7`,
    /// `dihedral:4`, `prod:cyclic:3,cyclic:5` or `trivial`. Several families
    /// may be joined with `;`.
    pub fn parse(spec: &str, cap: usize) -> Result<Self> {
        let mut members = Vec::new();
        for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            members.extend(parse_family_part(part, cap)?);
        }
        if members.is_empty() {
            return Err(Error::input(format!("family spec '{spec}' has no members")));
        }
        Ok(Self::new(spec.trim(), members))
    }
}

/// Parses a single group spec (`cyclic:n`, `dihedral:n`, `symmetric:n`,
/// `sl2:p`, `trivial`, `prod:A,B[,C…]`).
pub fn parse_group(spec: &str, cap: usize) -> Result<FiniteGroup> {
    let spec = spec.trim();
    if spec == "trivial" {
        return Ok(trivial());
    }
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::input(format!("group spec '{spec}' lacks a ':'")))?;
    if kind == "prod" {
        let mut parts = arg.split(',');
        let first = parse_group(parts.next().unwrap_or(""), cap)?;
        let mut acc = first;
        let mut any = false;
        for p in parts {
            acc = make_product(&acc, &parse_group(p, cap)?, cap)?;
            any = true;
        }
        if !any {
            return Err(Error::input("prod: needs at least two factors"));
        }
        return Ok(acc);
    }
    let n: usize = arg
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("group spec '{spec}': '{arg}' is not an integer")))?;
    build(kind, n)
}

fn build(kind: &str, n: usize) -> Result<FiniteGroup> {
    match kind {
        "cyclic" => make_cyclic(n),
        "dihedral" => make_dihedral(n),
        "symmetric" => make_symmetric(n),
        "sl2" => make_sl2(n),
        other => Err(Error::input(format!("unknown group kind '{other}'"))),
    }
}

fn parse_family_part(part: &str, cap: usize) -> Result<Vec<FiniteGroup>> {
    if part == "trivial" {
        return Ok(vec![trivial()]);
    }
    let (kind, list) = part
        .split_once(':')
        .ok_or_else(|| Error::input(format!("family spec '{part}' lacks a ':'")))?;
    if kind == "prod" {
        return Ok(vec![parse_group(part, cap)?]);
    }
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim) {
        for n in parse_range(item)? {
            let g = build(kind, n)?;
            if g.order() > cap {
                return Err(Error::Resource {
                    what: format!("{kind}:{n}"),
                    needed: g.order(),
                    cap,
                });
            }
            out.push(g);
        }
    }
    Ok(out)
}

fn parse_range(item: &str) -> Result<Vec<usize>> {
    let bad = || Error::input(format!("cannot parse '{item}' as n, a..b or a..b:step"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match item.split_once("..") {
        None => Ok(vec![num(item)?]),
        Some((a, rest)) => {
            let (b, step) = match rest.split_once(':') {
                Some((b, s)) => (num(b)?, num(s)?),
                None => (num(rest)?, 1),
            };
            let a = num(a)?;
            if step == 0 || b < a {
                return Err(bad());
            }
            Ok((a..=b).step_by(step).collect())
        }
    }
}
