//! Worst-case machinery over finite joint supports: ambiguity sets, maximum
//! ambiguity, and the log-ambiguity lower bound on any correct protocol's
//! informant bits.
//!
//! Supports are stored extensionally. All the league sets are finite, and the
//! bounds need only cardinalities, so `sup` is a plain maximum here.

use crate::bits::ceil_log2;
use crate::league::{LeagueError, TeamRef};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AmbiguityError {
    #[error("a support relation must be nonempty")]
    EmptyRelation,
    #[error("value is outside the conditioning coordinate's support")]
    OutsideSupport,
    #[error(transparent)]
    League(#[from] LeagueError),
}

/// A finite joint support: the set of `(x, y)` pairs two correlated values
/// can take. `x` is the coordinate to be inferred, `y` the conditioning one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportRelation<X: Ord, Y: Ord> {
    pairs: BTreeSet<(X, Y)>,
    pub x_label: String,
    pub y_label: String,
}

impl<X: Ord + Clone, Y: Ord + Clone> SupportRelation<X, Y> {
    pub fn new(
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        pairs: impl IntoIterator<Item = (X, Y)>,
    ) -> Result<Self, AmbiguityError> {
        let pairs: BTreeSet<(X, Y)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(AmbiguityError::EmptyRelation);
        }
        Ok(SupportRelation {
            pairs,
            x_label: x_label.into(),
            y_label: y_label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(X, Y)> {
        self.pairs.iter()
    }

    /// Projection onto the inferred coordinate.
    pub fn x_support(&self) -> BTreeSet<X> {
        self.pairs.iter().map(|(x, _)| x.clone()).collect()
    }

    /// Projection onto the conditioning coordinate.
    pub fn y_support(&self) -> BTreeSet<Y> {
        self.pairs.iter().map(|(_, y)| y.clone()).collect()
    }

    /// The `x` values jointly possible with a given `y`. Errors if `y` lies
    /// outside the conditioning support.
    pub fn ambiguity_set(&self, y: &Y) -> Result<BTreeSet<X>, AmbiguityError> {
        let set: BTreeSet<X> = self
            .pairs
            .iter()
            .filter(|(_, py)| py == y)
            .map(|(x, _)| x.clone())
            .collect();
        if set.is_empty() {
            Err(AmbiguityError::OutsideSupport)
        } else {
            Ok(set)
        }
    }

    /// Ambiguity per conditioning value, the maximum over them, and the
    /// resulting bit lower bound `ceil(log2 max)`.
    pub fn max_ambiguity(&self) -> AmbiguityReport<Y> {
        let mut per_y: BTreeMap<Y, usize> = BTreeMap::new();
        let mut seen_x: BTreeMap<&Y, BTreeSet<&X>> = BTreeMap::new();
        for (x, y) in &self.pairs {
            seen_x.entry(y).or_default().insert(x);
        }
        for (y, xs) in seen_x {
            per_y.insert(y.clone(), xs.len());
        }
        let max_ambiguity = per_y.values().copied().max().expect("relation is nonempty");
        AmbiguityReport {
            per_y,
            max_ambiguity,
            lower_bound_bits: ceil_log2(max_ambiguity as u64),
        }
    }
}

/// Ambiguity profile of a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityReport<Y: Ord> {
    pub per_y: BTreeMap<Y, usize>,
    pub max_ambiguity: usize,
    pub lower_bound_bits: u32,
}

impl<Y: Ord + fmt::Display> AmbiguityReport<Y> {
    /// The per-condition map with displayable keys, for serialization.
    pub fn per_y_display(&self) -> BTreeMap<String, usize> {
        self.per_y
            .iter()
            .map(|(y, c)| (y.to_string(), *c))
            .collect()
    }
}

/// An unordered pair of groups, stored sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupPair(u32, u32);

impl GroupPair {
    pub fn new(a: u32, b: u32) -> Self {
        assert_ne!(a, b, "a group pair needs two distinct groups");
        GroupPair(a.min(b), a.max(b))
    }

    pub fn lower(&self) -> u32 {
        self.0
    }

    pub fn upper(&self) -> u32 {
        self.1
    }
}

impl fmt::Display for GroupPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{g{},g{}}}", self.0, self.1)
    }
}

/// An unordered pair of teams, stored sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TeamPair(TeamRef, TeamRef);

impl TeamPair {
    pub fn new(a: TeamRef, b: TeamRef) -> Self {
        assert_ne!(a, b, "a team pair needs two distinct teams");
        if a <= b {
            TeamPair(a, b)
        } else {
            TeamPair(b, a)
        }
    }

    pub fn lower(&self) -> TeamRef {
        self.0
    }

    pub fn upper(&self) -> TeamRef {
        self.1
    }

    pub fn contains(&self, t: TeamRef) -> bool {
        self.0 == t || self.1 == t
    }
}

impl fmt::Display for TeamPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

/// The four support relations of the league problem.
#[derive(Clone, Debug)]
pub struct LeagueSupports {
    /// Team pair given the group pair.
    pub teams_given_groups: SupportRelation<TeamPair, GroupPair>,
    /// Winner given both teams.
    pub winner_given_teams: SupportRelation<TeamRef, TeamPair>,
    /// Winner given the group pair.
    pub winner_given_groups: SupportRelation<TeamRef, GroupPair>,
    /// The remaining (non-winning) team given its group.
    pub remaining_team_given_group: SupportRelation<TeamRef, u32>,
}

/// Enumerate the four league support sets for `n_groups` groups of
/// `teams_per_group` teams.
pub fn build_league_supports(
    n_groups: u32,
    teams_per_group: u32,
) -> Result<LeagueSupports, AmbiguityError> {
    if n_groups < 2 {
        return Err(LeagueError::TooFewGroups { n_groups }.into());
    }
    if teams_per_group < 1 {
        return Err(LeagueError::NoTeams.into());
    }

    let mut teams_given_groups = Vec::new();
    let mut winner_given_teams = Vec::new();
    let mut winner_given_groups = Vec::new();
    for gi in 0..n_groups {
        for gj in gi + 1..n_groups {
            let groups = GroupPair::new(gi, gj);
            for ti in 0..teams_per_group {
                let a = TeamRef { group: gi, index: ti };
                winner_given_groups.push((a, groups));
                for tj in 0..teams_per_group {
                    let b = TeamRef { group: gj, index: tj };
                    let teams = TeamPair::new(a, b);
                    teams_given_groups.push((teams, groups));
                    winner_given_teams.push((a, teams));
                    winner_given_teams.push((b, teams));
                }
            }
            for tj in 0..teams_per_group {
                winner_given_groups.push((TeamRef { group: gj, index: tj }, groups));
            }
        }
    }
    let remaining_team_given_group = (0..n_groups).flat_map(|g| {
        (0..teams_per_group).map(move |i| (TeamRef { group: g, index: i }, g))
    });

    Ok(LeagueSupports {
        teams_given_groups: SupportRelation::new("teams", "groups", teams_given_groups)?,
        winner_given_teams: SupportRelation::new("winner", "teams", winner_given_teams)?,
        winner_given_groups: SupportRelation::new("winner", "groups", winner_given_groups)?,
        remaining_team_given_group: SupportRelation::new(
            "remaining team",
            "group",
            remaining_team_given_group,
        )?,
    })
}
