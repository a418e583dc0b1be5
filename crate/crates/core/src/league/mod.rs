//! The three-party league problem: one recipient who heard which two groups
//! played, one informant who heard which two teams played, and one informant
//! who heard the winner.
//!
//! Group codes are fixed-length big-endian binary of the 0-based group index.
//! Team names are globally unique; winner announcements use the enumeration
//! code of a team's global index `group * t + index`, which is what keeps the
//! winner identifiable across groups.

use crate::bits::{ceil_log2, Bits};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

mod protocols;

pub use protocols::{
    compare_orders, run_no_interaction, run_y_first, run_z_first, ComparisonReport,
    ProtocolBits, ProtocolKind, ProtocolRun,
};

#[derive(Debug, Error, PartialEq)]
pub enum LeagueError {
    #[error("a league needs at least two groups, got {n_groups}")]
    TooFewGroups { n_groups: u32 },
    #[error("a league needs at least one team per group")]
    NoTeams,
    #[error("group {group} out of range for {n_groups} groups")]
    GroupOutOfRange { group: u32, n_groups: u32 },
    #[error("team index {index} out of range for {teams_per_group} teams per group")]
    TeamOutOfRange { index: u32, teams_per_group: u32 },
    #[error("a match needs teams from two distinct groups, both are in group {group}")]
    SameGroup { group: u32 },
    #[error("the winner is not one of the two teams playing")]
    WinnerNotPlaying,
    #[error("malformed message while decoding {context}")]
    MalformedMessage { context: &'static str },
}

/// League sizing and the fixed-length encodings derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeagueConfig {
    n_groups: u32,
    teams_per_group: u32,
}

impl LeagueConfig {
    pub fn new(n_groups: u32, teams_per_group: u32) -> Result<Self, LeagueError> {
        if n_groups < 2 {
            return Err(LeagueError::TooFewGroups { n_groups });
        }
        if teams_per_group < 1 {
            return Err(LeagueError::NoTeams);
        }
        Ok(LeagueConfig {
            n_groups,
            teams_per_group,
        })
    }

    pub fn n_groups(&self) -> u32 {
        self.n_groups
    }

    pub fn teams_per_group(&self) -> u32 {
        self.teams_per_group
    }

    /// Bits in a group code.
    pub fn group_code_len(&self) -> u32 {
        ceil_log2(u64::from(self.n_groups))
    }

    /// Bits in a within-group team index code.
    pub fn team_code_len(&self) -> u32 {
        ceil_log2(u64::from(self.teams_per_group))
    }

    /// Bits in a globally unique team name (group code ++ team code).
    pub fn global_team_code_len(&self) -> u32 {
        self.group_code_len() + self.team_code_len()
    }

    /// Bits in the enumeration code of a team's global index, the encoding
    /// winner announcements use.
    pub fn enum_code_len(&self) -> u32 {
        ceil_log2(u64::from(self.n_groups) * u64::from(self.teams_per_group))
    }

    pub fn group_code(&self, group: u32) -> Bits {
        debug_assert!(group < self.n_groups);
        Bits::encode_be(u64::from(group), self.group_code_len())
    }

    pub fn team_code(&self, index: u32) -> Bits {
        debug_assert!(index < self.teams_per_group);
        Bits::encode_be(u64::from(index), self.team_code_len())
    }

    pub fn enum_code(&self, team: TeamRef) -> Bits {
        Bits::encode_be(
            u64::from(team.group) * u64::from(self.teams_per_group) + u64::from(team.index),
            self.enum_code_len(),
        )
    }

    /// Concatenated globally unique name, useful for display and the
    /// uniqueness argument; the protocols themselves exchange group, team
    /// index, and enumeration codes.
    pub fn global_name(&self, team: TeamRef) -> Bits {
        self.group_code(team.group).concat(&self.team_code(team.index))
    }

    pub fn team_from_enum(&self, value: u64) -> Result<TeamRef, LeagueError> {
        let t = u64::from(self.teams_per_group);
        let team = TeamRef {
            group: (value / t) as u32,
            index: (value % t) as u32,
        };
        if team.group >= self.n_groups {
            return Err(LeagueError::GroupOutOfRange {
                group: team.group,
                n_groups: self.n_groups,
            });
        }
        Ok(team)
    }
}

/// A team identified by its group and its index within the group (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TeamRef {
    pub group: u32,
    pub index: u32,
}

impl fmt::Display for TeamRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}t{}", self.group, self.index)
    }
}

/// One announced match: two teams from distinct groups and the winner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MatchInstance {
    pub first: TeamRef,
    pub second: TeamRef,
    pub winner: TeamRef,
}

impl MatchInstance {
    pub fn new(first: TeamRef, second: TeamRef, winner: TeamRef) -> Result<Self, LeagueError> {
        if first.group == second.group {
            return Err(LeagueError::SameGroup { group: first.group });
        }
        if winner != first && winner != second {
            return Err(LeagueError::WinnerNotPlaying);
        }
        Ok(MatchInstance {
            first,
            second,
            winner,
        })
    }

    pub fn validate(&self, cfg: &LeagueConfig) -> Result<(), LeagueError> {
        for team in [self.first, self.second, self.winner] {
            if team.group >= cfg.n_groups() {
                return Err(LeagueError::GroupOutOfRange {
                    group: team.group,
                    n_groups: cfg.n_groups(),
                });
            }
            if team.index >= cfg.teams_per_group() {
                return Err(LeagueError::TeamOutOfRange {
                    index: team.index,
                    teams_per_group: cfg.teams_per_group(),
                });
            }
        }
        Ok(())
    }

    /// The same match with the lower-numbered group first. The recipient
    /// holds the group pair unordered, so reconstructions are reported in
    /// this form.
    pub fn canonical(self) -> Self {
        if self.first.group <= self.second.group {
            self
        } else {
            MatchInstance {
                first: self.second,
                second: self.first,
                winner: self.winner,
            }
        }
    }

    pub fn loser(&self) -> TeamRef {
        if self.winner == self.first {
            self.second
        } else {
            self.first
        }
    }
}

/// What each party knows after the interrupted announcement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnowledgeState {
    /// The two groups, as an unordered (sorted) pair.
    pub x_knows: (u32, u32),
    /// The two teams, sorted by group.
    pub y_knows: (TeamRef, TeamRef),
    /// The winner.
    pub z_knows: TeamRef,
}

impl KnowledgeState {
    pub fn from_match(cfg: &LeagueConfig, m: &MatchInstance) -> Result<Self, LeagueError> {
        m.validate(cfg)?;
        let c = m.canonical();
        Ok(KnowledgeState {
            x_knows: (c.first.group, c.second.group),
            y_knows: (c.first, c.second),
            z_knows: c.winner,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Party {
    X,
    Y,
    Z,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::X => "X",
            Party::Y => "Y",
            Party::Z => "Z",
        })
    }
}

/// One protocol message. Zero-length payloads are recorded like any other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Msg {
    pub sender: Party,
    pub bits: Bits,
    pub purpose: String,
}

/// Ordered message log of one protocol run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub messages: Vec<Msg>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    fn push(&mut self, sender: Party, bits: Bits, purpose: &str) {
        self.messages.push(Msg {
            sender,
            bits,
            purpose: purpose.to_owned(),
        });
    }

    pub fn party_bits(&self, party: Party) -> usize {
        self.messages
            .iter()
            .filter(|m| m.sender == party)
            .map(|m| m.bits.len())
            .sum()
    }

    pub fn per_party_bits(&self) -> BTreeMap<Party, usize> {
        [Party::X, Party::Y, Party::Z]
            .into_iter()
            .map(|p| (p, self.party_bits(p)))
            .collect()
    }

    pub fn total_bits(&self) -> usize {
        self.messages.iter().map(|m| m.bits.len()).sum()
    }

    /// Bits sent by the two informants together.
    pub fn informant_bits(&self) -> usize {
        self.party_bits(Party::Y) + self.party_bits(Party::Z)
    }

    /// Message count after concatenating consecutive messages from the same
    /// sender into one.
    pub fn grouped_message_count(&self) -> usize {
        let mut count = 0;
        let mut last = None;
        for m in &self.messages {
            if last != Some(m.sender) {
                count += 1;
                last = Some(m.sender);
            }
        }
        count
    }
}

/// Every match under a config, in canonical form: unordered group pairs
/// `(i < j)`, all team combinations, both winners.
pub fn enumerate_matches(cfg: &LeagueConfig) -> Vec<MatchInstance> {
    let mut out = Vec::new();
    for gi in 0..cfg.n_groups() {
        for gj in gi + 1..cfg.n_groups() {
            for ti in 0..cfg.teams_per_group() {
                for tj in 0..cfg.teams_per_group() {
                    let a = TeamRef { group: gi, index: ti };
                    let b = TeamRef { group: gj, index: tj };
                    for winner in [a, b] {
                        out.push(MatchInstance::new(a, b, winner).expect("valid by construction"));
                    }
                }
            }
        }
    }
    out
}
