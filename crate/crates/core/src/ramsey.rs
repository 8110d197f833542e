//! Two-colorings of `r`-subsets, partition arrows `a → (b, c)^r`, the
//! `t`-ladder and the five-slot position lemma.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::SetMapping;
use crate::set::{binomial, ElementSet, MAX_GROUND};

/// Largest `C(a, r)` the exhaustive checker accepts by default.
pub const EXHAUSTIVE_CAP: u64 = 24;

/// A total 2-coloring of the `r`-subsets of `{0,..,a-1}`, stored in
/// lexicographic order of the subsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    a: usize,
    r: usize,
    colors: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct ColoringDoc {
    a: usize,
    bits: String,
    r: usize,
}

/// Index of `tuple` among the `r`-subsets of `{0,..,a-1}` in lexicographic order.
pub fn lex_index(a: usize, tuple: ElementSet) -> usize {
    let r = tuple.len();
    let mut index = 0u64;
    let mut next = 0;
    for (i, x) in tuple.iter().enumerate() {
        for v in next..x {
            index += binomial(a - 1 - v, r - 1 - i);
        }
        next = x + 1;
    }
    index as usize
}

impl Coloring {
    pub fn new(a: usize, r: usize, colors: Vec<bool>) -> Result<Self> {
        if a > MAX_GROUND {
            return Err(Error::GroundSize(a));
        }
        let expected = binomial(a, r) as usize;
        if colors.len() != expected {
            return Err(Error::Parse(format!(
                "coloring of C({a},{r}) tuples needs {expected} colors, got {}",
                colors.len()
            )));
        }
        Ok(Coloring { a, r, colors })
    }

    pub fn constant(a: usize, r: usize, color: bool) -> Result<Self> {
        Coloring::new(a, r, vec![color; binomial(a, r) as usize])
    }

    pub fn vertices(&self) -> usize {
        self.a
    }

    pub fn tuple_size(&self) -> usize {
        self.r
    }

    /// Colors in lexicographic order of the tuples.
    pub fn colors(&self) -> &[bool] {
        &self.colors
    }

    /// The tuples in the order of [`Coloring::colors`].
    pub fn tuples(&self) -> impl Iterator<Item = ElementSet> {
        ElementSet::below(self.a).subsets_of_size(self.r)
    }

    pub fn color(&self, tuple: ElementSet) -> bool {
        self.colors[lex_index(self.a, tuple)]
    }

    /// The coloring with 0 and 1 exchanged.
    pub fn flipped(&self) -> Coloring {
        Coloring {
            a: self.a,
            r: self.r,
            colors: self.colors.iter().map(|c| !c).collect(),
        }
    }

    /// Lexicographically least `size`-subset whose `r`-subsets all have `color`.
    pub fn find_homogeneous(&self, color: bool, size: usize) -> Option<ElementSet> {
        fn dfs(c: &Coloring, color: bool, size: usize, from: usize, current: ElementSet) -> Option<ElementSet> {
            if current.len() == size {
                return Some(current);
            }
            for v in from..c.a {
                if c.a - v < size - current.len() {
                    break;
                }
                let ok = current.len() + 1 < c.r
                    || current
                        .subsets_of_size(c.r - 1)
                        .all(|rest| c.color(rest.with(v)) == color);
                if ok {
                    if let Some(found) = dfs(c, color, size, v + 1, current.with(v)) {
                        return Some(found);
                    }
                }
            }
            None
        }
        if size > self.a {
            return None;
        }
        dfs(self, color, size, 0, ElementSet::EMPTY)
    }

    /// A 0-homogeneous `b`-set or a 1-homogeneous `c`-set, whichever is found first.
    pub fn certificate(&self, b: usize, c: usize) -> Option<(bool, ElementSet)> {
        self.find_homogeneous(false, b)
            .map(|s| (false, s))
            .or_else(|| self.find_homogeneous(true, c).map(|s| (true, s)))
    }

    /// No 0-homogeneous `b`-set and no 1-homogeneous `c`-set.
    pub fn is_counterexample(&self, b: usize, c: usize) -> bool {
        self.certificate(b, c).is_none()
    }

    pub fn to_json(&self) -> String {
        let doc = ColoringDoc {
            a: self.a,
            bits: self.colors.iter().map(|&c| if c { '1' } else { '0' }).collect(),
            r: self.r,
        };
        serde_json::to_string_pretty(&doc).expect("coloring serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ColoringDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let colors = doc
            .bits
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("bad color {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Coloring::new(doc.a, doc.r, colors)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowVerdict {
    pub holds: bool,
    /// The lexicographically least counterexample when the arrow fails.
    pub counterexample: Option<Coloring>,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrowConfig {
    /// Largest `C(a, r)` accepted.
    pub cap: u64,
    /// Prune colorings that a vertex transposition makes lexicographically smaller.
    pub symmetry: bool,
}

impl Default for ArrowConfig {
    fn default() -> Self {
        ArrowConfig {
            cap: EXHAUSTIVE_CAP,
            symmetry: true,
        }
    }
}

/// Tuple masks of every `size`-subset of the vertices, with the index of
/// the lexicographically last tuple inside each.
struct Layout {
    n: usize,
    b_sets: Vec<(u32, usize)>,
    c_sets: Vec<(u32, usize)>,
    transpositions: Vec<Vec<usize>>,
}

impl Layout {
    fn new(a: usize, b: usize, c: usize, r: usize) -> Self {
        let n = binomial(a, r) as usize;
        let masks = |size: usize| -> Vec<(u32, usize)> {
            if size > a {
                return Vec::new();
            }
            ElementSet::below(a)
                .subsets_of_size(size)
                .map(|s| {
                    let mask = s.subsets_of_size(r).fold(0u32, |m, t| m | 1 << lex_index(a, t));
                    (mask, 31 - mask.leading_zeros() as usize)
                })
                .collect()
        };
        let tuples: Vec<ElementSet> = ElementSet::below(a).subsets_of_size(r).collect();
        let transpositions = ElementSet::below(a)
            .subsets_of_size(2)
            .map(|swap| {
                let (i, j) = (swap.nth(0).unwrap(), swap.nth(1).unwrap());
                tuples
                    .iter()
                    .map(|t| {
                        let image = match (t.contains(i), t.contains(j)) {
                            (true, false) => t.without(i).with(j),
                            (false, true) => t.without(j).with(i),
                            _ => *t,
                        };
                        lex_index(a, image)
                    })
                    .collect()
            })
            .collect();
        Layout {
            n,
            b_sets: masks(b),
            c_sets: masks(c),
            transpositions,
        }
    }

    fn is_counterexample(&self, bits: u32) -> bool {
        self.b_sets.iter().all(|&(m, _)| bits & m != 0) && self.c_sets.iter().all(|&(m, _)| bits & m != m)
    }
}

fn check_arrow_args(a: usize, b: usize, c: usize, r: usize, cap: Option<u64>) -> Result<()> {
    if r == 0 {
        return Err(Error::TooSmall {
            what: "tuple size r",
            min: 1,
            got: r,
        });
    }
    for (what, x) in [("homogeneous size b", b), ("homogeneous size c", c)] {
        if x < r {
            return Err(Error::TooSmall { what, min: r, got: x });
        }
    }
    if a > MAX_GROUND {
        return Err(Error::GroundSize(a));
    }
    if let Some(cap) = cap {
        // colorings are packed into a u32
        let cap = cap.min(31);
        let tuples = binomial(a, r);
        if tuples > cap {
            return Err(Error::ArrowCap { a, r, tuples, cap });
        }
    }
    Ok(())
}

fn to_coloring(a: usize, r: usize, n: usize, bits: u32) -> Coloring {
    Coloring {
        a,
        r,
        colors: (0..n).map(|i| bits >> i & 1 == 1).collect(),
    }
}

/// Decides `a → (b, c)^r`: every 2-coloring of the `r`-subsets of `a`
/// vertices has a 0-homogeneous `b`-set or a 1-homogeneous `c`-set.
pub fn arrow_check(a: usize, b: usize, c: usize, r: usize) -> Result<ArrowVerdict> {
    arrow_check_with(a, b, c, r, &ArrowConfig::default())
}

/// Depth-first search over colorings in lexicographic order, pruning once a
/// forbidden homogeneous set is fully colored.
pub fn arrow_check_with(a: usize, b: usize, c: usize, r: usize, cfg: &ArrowConfig) -> Result<ArrowVerdict> {
    check_arrow_args(a, b, c, r, Some(cfg.cap))?;
    let layout = Layout::new(a, b, c, r);
    let mut closing = vec![(Vec::new(), Vec::new()); layout.n];
    for &(m, last) in &layout.b_sets {
        closing[last].0.push(m);
    }
    for &(m, last) in &layout.c_sets {
        closing[last].1.push(m);
    }

    struct Search<'a> {
        layout: &'a Layout,
        closing: &'a [(Vec<u32>, Vec<u32>)],
        symmetry: bool,
        nodes: u64,
    }

    impl Search<'_> {
        fn lex_leader(&self, p: usize, bits: u32) -> bool {
            self.layout.transpositions.iter().all(|sigma| {
                for t in 0..=p {
                    let s = sigma[t];
                    if s > p {
                        return true;
                    }
                    let (ct, cs) = (bits >> t & 1, bits >> s & 1);
                    if ct != cs {
                        return ct < cs;
                    }
                }
                true
            })
        }

        fn dfs(&mut self, p: usize, bits: u32) -> Option<u32> {
            if p == self.layout.n {
                return Some(bits);
            }
            for color in [0u32, 1] {
                self.nodes += 1;
                let bits = bits | color << p;
                let (zeros, ones) = &self.closing[p];
                if zeros.iter().any(|&m| bits & m == 0) || ones.iter().any(|&m| bits & m == m) {
                    continue;
                }
                if self.symmetry && !self.lex_leader(p, bits) {
                    continue;
                }
                if let Some(found) = self.dfs(p + 1, bits) {
                    return Some(found);
                }
            }
            None
        }
    }

    let mut search = Search {
        layout: &layout,
        closing: &closing,
        symmetry: cfg.symmetry,
        nodes: 0,
    };
    let found = search.dfs(0, 0);
    Ok(ArrowVerdict {
        holds: found.is_none(),
        counterexample: found.map(|bits| to_coloring(a, r, layout.n, bits)),
        nodes: search.nodes,
    })
}

/// Reference check visiting all `2^C(a,r)` colorings in lexicographic order
/// without any pruning; `nodes` counts the colorings examined.
pub fn arrow_check_sweep(a: usize, b: usize, c: usize, r: usize, cap: u64) -> Result<ArrowVerdict> {
    check_arrow_args(a, b, c, r, Some(cap))?;
    let layout = Layout::new(a, b, c, r);
    let n = layout.n;
    let mut nodes = 0u64;
    for v in 0u64..1 << n {
        nodes += 1;
        // the first tuple is the most significant position
        let bits = if n == 0 { 0 } else { (v as u32).reverse_bits() >> (32 - n) };
        if layout.is_counterexample(bits) {
            return Ok(ArrowVerdict {
                holds: false,
                counterexample: Some(to_coloring(a, r, n, bits)),
                nodes,
            });
        }
    }
    Ok(ArrowVerdict {
        holds: true,
        counterexample: None,
        nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefuteConfig {
    pub seed: u64,
    pub restarts: u32,
    pub max_flips: u32,
    /// Largest total size of the homogeneity constraints the search will build.
    pub max_constraint_size: u64,
}

impl Default for RefuteConfig {
    fn default() -> Self {
        RefuteConfig {
            seed: 0,
            restarts: 20,
            max_flips: 20_000,
            max_constraint_size: 5_000_000,
        }
    }
}

/// Looks for a counterexample to `a → (b, c)^r` by seeded local search.
/// `Ok(None)` means none was found, which proves nothing.
pub fn refute_arrow(a: usize, b: usize, c: usize, r: usize, cfg: &RefuteConfig) -> Result<Option<Coloring>> {
    check_arrow_args(a, b, c, r, None)?;
    let n = binomial(a, r);
    let size = |s: usize| if s > a { 0 } else { binomial(a, s).saturating_mul(binomial(s, r)) };
    let total = size(b).saturating_add(size(c)).saturating_add(n);
    if total > cfg.max_constraint_size {
        return Err(Error::ArrowCap {
            a,
            r,
            tuples: total,
            cap: cfg.max_constraint_size,
        });
    }
    if b > a {
        return Ok(Some(Coloring::constant(a, r, false)?));
    }
    if c > a {
        return Ok(Some(Coloring::constant(a, r, true)?));
    }

    // constraint sets: (tuple indices, forbidden color)
    let mut sets: Vec<(Vec<usize>, bool)> = Vec::new();
    for (s, color) in [(b, false), (c, true)] {
        if s > a {
            continue;
        }
        for members in ElementSet::below(a).subsets_of_size(s) {
            sets.push((members.subsets_of_size(r).map(|t| lex_index(a, t)).collect(), color));
        }
    }
    let n = n as usize;
    let mut member_of = vec![Vec::new(); n];
    for (i, (tuples, _)) in sets.iter().enumerate() {
        for &t in tuples {
            member_of[t].push(i);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.restarts {
        let mut colors: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let mut ones: Vec<usize> = sets
            .iter()
            .map(|(tuples, _)| tuples.iter().filter(|&&t| colors[t]).count())
            .collect();
        let bad = |i: usize, ones: &[usize]| {
            let (tuples, color) = &sets[i];
            if *color {
                ones[i] == tuples.len()
            } else {
                ones[i] == 0
            }
        };
        let mut violated = (0..sets.len()).filter(|&i| bad(i, &ones)).count();
        for _ in 0..cfg.max_flips {
            if violated == 0 {
                break;
            }
            let start = rng.gen_range(0..sets.len());
            let target = (0..sets.len())
                .map(|k| (start + k) % sets.len())
                .find(|&i| bad(i, &ones))
                .expect("a violated set exists");
            let tuples = &sets[target].0;
            let t = tuples[rng.gen_range(0..tuples.len())];
            for &i in &member_of[t] {
                violated -= bad(i, &ones) as usize;
            }
            colors[t] = !colors[t];
            for &i in &member_of[t] {
                if colors[t] {
                    ones[i] += 1;
                } else {
                    ones[i] -= 1;
                }
                violated += bad(i, &ones) as usize;
            }
        }
        if violated == 0 {
            return Ok(Some(Coloring { a, r, colors }));
        }
    }
    Ok(None)
}

/// One rung of the ladder `t_0 = 5`, `t_{n+1}` least with `t_{n+1} → (t_n, 7)^5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub index: usize,
    /// The exact value, or a lower bound when `exact` is false.
    pub value: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderConfig {
    /// How many vertex counts past the previous rung the refutation scan tries.
    pub span: usize,
    pub refute: RefuteConfig,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            span: 4,
            refute: RefuteConfig::default(),
        }
    }
}

pub const LADDER_BASE: usize = 5;
pub const LADDER_C: usize = 7;
pub const LADDER_R: usize = 5;

pub fn t_ladder(n_max: usize) -> Vec<LadderEntry> {
    t_ladder_with(n_max, &LadderConfig::default())
}

/// Rungs are exact while the previous rung is exact and `C(a, 5)` fits the
/// exhaustive checker; otherwise the value is one more than the largest
/// vertex count refuted by the counterexample search.
pub fn t_ladder_with(n_max: usize, cfg: &LadderConfig) -> Vec<LadderEntry> {
    let mut ladder = vec![LadderEntry {
        index: 0,
        value: LADDER_BASE,
        exact: true,
    }];
    for index in 1..=n_max {
        let prev = ladder[index - 1];
        let b = prev.value;
        let mut entry = None;
        let mut a = b;
        while a <= b + cfg.span {
            if prev.exact && binomial(a, LADDER_R) <= EXHAUSTIVE_CAP {
                match arrow_check(a, b, LADDER_C, LADDER_R) {
                    Ok(v) if v.holds => {
                        entry = Some(LadderEntry { index, value: a, exact: true });
                        break;
                    }
                    Ok(_) => {
                        a += 1;
                        continue;
                    }
                    Err(_) => break,
                }
            }
            let refute = RefuteConfig {
                seed: cfg.refute.seed ^ (index as u64) << 32 ^ a as u64,
                ..cfg.refute
            };
            match refute_arrow(a, b, LADDER_C, LADDER_R, &refute) {
                Ok(Some(_)) => a += 1,
                _ => break,
            }
        }
        ladder.push(entry.unwrap_or(LadderEntry {
            index,
            value: a,
            exact: false,
        }));
    }
    ladder
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionScan {
    Holds,
    /// First pair of positions, in lexicographic order, with no good 5-subchain.
    Fails(usize, usize),
}

/// Whether every pair of positions in a chain of `size` points fits into the
/// outer slots `{0, 1, 3, 4}` of some 5-subchain.
pub fn position_lemma_scan(size: usize) -> PositionScan {
    let chain = ElementSet::below(size.min(MAX_GROUND));
    for marks in chain.subsets_of_size(2) {
        let (i, j) = (marks.nth(0).unwrap(), marks.nth(1).unwrap());
        let fits = chain.subsets_of_size(5).any(|sub| {
            let middle = sub.nth(2).unwrap();
            marks.is_subset(sub) && middle != i && middle != j
        });
        if !fits {
            return PositionScan::Fails(i, j);
        }
    }
    PositionScan::Holds
}

/// Colors each triple `x < y < z` of `chain` by whether `x ∈ F({y, z})`,
/// with the chain's elements renumbered `0, 1, ..` in increasing order.
pub fn triple_coloring(big_f: &SetMapping, chain: ElementSet) -> Result<Coloring> {
    if big_f.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: big_f.arity(),
        });
    }
    big_f.ground().check(chain)?;
    let colors = chain
        .subsets_of_size(3)
        .map(|t| {
            let x = t.min().expect("three elements");
            big_f.image(t.without(x)).contains(x)
        })
        .collect();
    Coloring::new(chain.len(), 3, colors)
}
