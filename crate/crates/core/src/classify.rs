//! Combinatorics of admissible models.
//!
//! A model `{[M_1..M_K], (c_1..c_K)}` is admissible when the rescaled level
//! sets `c_k {1-M_k, 3-M_k, ..., M_k-1}` tile `{1-N, 3-N, ..., N-1}` exactly,
//! which is what keeps the direct sum isospectral with the single block.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::hubbard::{level_indices, BlockSpec, ModelConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("cannot render notation for an inadmissible model: {0}")]
    Inadmissible(AdmissibilityViolation),
    #[error("malformed index notation {input:?}: {reason}")]
    Notation { input: String, reason: String },
}

/// Partition of `N` into parts `>= 2`, nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Sorted set of integer quantum numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(Vec<i64>);

impl IndexSet {
    /// `{1-N, 3-N, ..., N-1}`.
    pub fn full(n: usize) -> Self {
        Self(level_indices(n))
    }

    /// Builds a set from arbitrary elements (sorted, duplicates kept out).
    pub fn from_elements(mut elements: Vec<i64>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        Self(elements)
    }

    pub fn elements(&self) -> &[i64] {
        &self.0
    }

    pub fn nonnegative(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied().filter(|&x| x >= 0)
    }

    pub fn is_centrally_symmetric(&self) -> bool {
        self.0
            .iter()
            .zip(self.0.iter().rev())
            .all(|(a, b)| *a == -*b)
    }

    /// Common spacing of consecutive elements, if any.
    pub fn step(&self) -> Option<i64> {
        let d = self.0.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>();
        match d.first() {
            Some(&s) if d.iter().all(|&x| x == s) => Some(s),
            _ => None,
        }
    }
}

/// Partitions of `n` into parts `>= 2`, in reverse-lexicographic order.
pub fn partitions_min2(n: usize) -> Result<Vec<Partition>, ClassifyError> {
    if n < 2 {
        return Err(ClassifyError::DimensionTooSmall(n));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill_partitions(n, n, &mut current, &mut out);
    Ok(out)
}

fn fill_partitions(
    rest: usize,
    max_part: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) {
    if rest == 0 {
        out.push(Partition(current.clone()));
        return;
    }
    for part in (2..=max_part.min(rest)).rev() {
        // a remainder of exactly 1 can never be completed
        if rest - part == 1 {
            continue;
        }
        current.push(part);
        fill_partitions(rest - part, part, current, out);
        current.pop();
    }
}

pub fn count_partitions(n: usize) -> Result<usize, ClassifyError> {
    Ok(partitions_min2(n)?.len())
}

/// `c {1-M, 3-M, ..., M-1}`.
pub fn block_index_set(spec: BlockSpec) -> IndexSet {
    IndexSet(spec.diagonal_coefficients().collect())
}

/// Why a model fails to tile the level set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibilityViolation {
    /// A block produces a level outside `{1-N, ..., N-1}`.
    OutOfRange { block: usize, element: i64 },
    /// Two blocks (or one block twice) claim the same level.
    Collision {
        element: i64,
        blocks: (usize, usize),
    },
    /// Some level is claimed by no block.
    Missing { element: i64 },
}

impl fmt::Display for AdmissibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OutOfRange { block, element } => {
                write!(
                    f,
                    "block {block} produces level {element} outside the level set"
                )
            }
            Self::Collision { element, blocks } => write!(
                f,
                "level {element} is claimed by blocks {} and {} (union is not disjoint)",
                blocks.0, blocks.1
            ),
            Self::Missing { element } => write!(f, "level {element} is not covered by any block"),
        }
    }
}

/// First reason the block level sets fail to tile `S(N)`, or `None`.
pub fn admissibility_violation(config: &ModelConfig) -> Option<AdmissibilityViolation> {
    let full = level_indices(config.dimension());
    let lo = full[0];
    let hi = *full.last().expect("N >= 2");
    let mut owner: BTreeMap<i64, usize> = BTreeMap::new();
    for (b, spec) in config.blocks().iter().enumerate() {
        for e in block_index_set(*spec).0 {
            // S(N) has the parity of N - 1
            if e < lo || e > hi || (e - lo) % 2 != 0 {
                return Some(AdmissibilityViolation::OutOfRange {
                    block: b,
                    element: e,
                });
            }
            if let Some(&first) = owner.get(&e) {
                return Some(AdmissibilityViolation::Collision {
                    element: e,
                    blocks: (first, b),
                });
            }
            owner.insert(e, b);
        }
    }
    full.into_iter()
        .find(|e| !owner.contains_key(e))
        .map(|element| AdmissibilityViolation::Missing { element })
}

pub fn is_admissible(config: &ModelConfig) -> bool {
    admissibility_violation(config).is_none()
}

/// Every admissible model of dimension `n`: partitions in reverse-lex
/// order, scale lists lexicographic within a partition.
///
/// Exhaustive search over scales `1..=n-1`; any larger scale pushes the
/// outermost level `(M-1) c` beyond `n - 1`.
pub fn enumerate_models(n: usize) -> Result<Vec<ModelConfig>, ClassifyError> {
    let mut out = Vec::new();
    for partition in partitions_min2(n)? {
        let parts = partition.parts();
        let mut used = vec![false; 2 * n - 1];
        let mut scales = Vec::with_capacity(parts.len());
        assign_scales(n, parts, &mut scales, &mut used, &mut out);
    }
    Ok(out)
}

fn assign_scales(
    n: usize,
    parts: &[usize],
    scales: &mut Vec<u32>,
    used: &mut [bool],
    out: &mut Vec<ModelConfig>,
) {
    let k = scales.len();
    if k == parts.len() {
        // parts sum to n and the levels are disjoint, so they cover S(n)
        let config = ModelConfig::from_parts(n, parts, scales).expect("valid by construction");
        out.push(config);
        return;
    }
    let m = parts[k];
    // canonical order: nondecreasing scales inside a run of equal sizes
    let first = if k > 0 && parts[k - 1] == m {
        scales[k - 1]
    } else {
        1
    };
    let offset = n as i64 - 1;
    for c in first..n as u32 {
        let spec = BlockSpec::new(m, c).expect("part >= 2 and c >= 1");
        let levels = block_index_set(spec);
        if levels.0.last().is_some_and(|&top| top > offset) {
            break;
        }
        let slots: Option<Vec<usize>> = levels
            .0
            .iter()
            .map(|&e| {
                let shifted = e + offset;
                (shifted % 2 == 0 && !used[shifted as usize]).then_some(shifted as usize)
            })
            .collect();
        let Some(slots) = slots else { continue };
        // a block never repeats a level of its own, so marking is safe
        for &s in &slots {
            used[s] = true;
        }
        scales.push(c);
        assign_scales(n, parts, scales, used, out);
        scales.pop();
        for &s in &slots {
            used[s] = false;
        }
    }
}

pub fn count_models(n: usize) -> Result<usize, ClassifyError> {
    Ok(enumerate_models(n)?.len())
}

/// Compact level-set label, e.g. `{02}{4}` for `{[3,2], (1,4)}`.
///
/// Each block contributes its nonnegative levels; blocks are ordered by
/// their smallest nonnegative level, so the block holding 0 comes first for
/// odd `N`. Levels of 10 or more switch the whole label to comma-separated
/// form, with commas between groups as well: `{0,2,4,6,8},{10}`.
pub fn render_index_notation(config: &ModelConfig) -> Result<String, ClassifyError> {
    if let Some(v) = admissibility_violation(config) {
        return Err(ClassifyError::Inadmissible(v));
    }
    let mut groups: Vec<Vec<i64>> = config
        .blocks()
        .iter()
        .map(|&spec| block_index_set(spec).nonnegative().collect())
        .collect();
    groups.sort_by_key(|g| g[0]);
    let compact = groups.iter().flatten().all(|&e| e < 10);
    let sep = if compact { "" } else { "," };
    let rendered: Vec<String> = groups
        .iter()
        .map(|g| {
            let items: Vec<String> = g.iter().map(ToString::to_string).collect();
            format!("{{{}}}", items.join(sep))
        })
        .collect();
    Ok(rendered.join(sep))
}

/// Parses either notation form back into full, centrally symmetric level sets.
///
/// Any comma in the input selects the comma-separated form for every group.
pub fn parse_index_notation(input: &str) -> Result<Vec<IndexSet>, ClassifyError> {
    let err = |reason: &str| ClassifyError::Notation {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let listed = input.contains(',');
    let mut sets = Vec::new();
    let mut rest = input.trim();
    while !rest.is_empty() {
        let body_end = rest.find('}').ok_or_else(|| err("unclosed brace"))?;
        let body = rest
            .strip_prefix('{')
            .map(|r| &r[..body_end - 1])
            .ok_or_else(|| err("expected '{'"))?;
        if body.is_empty() {
            return Err(err("empty group"));
        }
        let half: Vec<i64> = if listed {
            body.split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| err("bad number")))
                .collect::<Result<_, _>>()?
        } else {
            body.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(i64::from)
                        .ok_or_else(|| err("bad digit"))
                })
                .collect::<Result<_, _>>()?
        };
        if half.iter().any(|&e| e < 0) {
            return Err(err("negative level"));
        }
        let full: Vec<i64> = half.iter().flat_map(|&e| [e, -e]).collect();
        sets.push(IndexSet::from_elements(full));
        rest = rest[body_end + 1..].trim_start();
        if listed {
            rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
        }
    }
    if sets.is_empty() {
        return Err(err("no groups"));
    }
    Ok(sets)
}
