//! The three announcement-reconstruction protocols and their comparison.
//!
//! Each run drives the parties message by message: senders draw only on their
//! own knowledge plus previously logged messages, and the recipient's final
//! reconstruction is decoded from the transcript alone. Reconstructions come
//! back in canonical form (lower-numbered group first) since the recipient
//! holds the group pair unordered.

use super::{
    KnowledgeState, LeagueConfig, LeagueError, MatchInstance, Party, TeamRef, Transcript,
};
use crate::bits::{ceil_log2, first_diff, Bits};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    NoInteraction,
    YFirst,
    ZFirst,
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProtocolKind::NoInteraction => "no_interaction",
            ProtocolKind::YFirst => "y_first",
            ProtocolKind::ZFirst => "z_first",
        })
    }
}

/// Outcome of one protocol run: what the recipient inferred, and the full
/// message log.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub reconstructed: MatchInstance,
    pub transcript: Transcript,
}

/// Bit counts of one protocol at a given league size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProtocolBits {
    pub protocol: ProtocolKind,
    pub x_bits: usize,
    pub y_bits: usize,
    pub z_bits: usize,
    pub total_bits: usize,
    pub informant_bits: usize,
    pub grouped_messages: usize,
}

/// Side-by-side bit counts for the three protocols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub runs: Vec<ProtocolBits>,
    /// Whether the two interactive orders end up with different totals.
    pub order_dependent: bool,
}

/// Index width for a position within a `code_len`-bit code.
fn position_len(code_len: u32) -> u32 {
    ceil_log2(u64::from(code_len))
}

fn encode_position(pos: usize, code_len: u32) -> Bits {
    Bits::encode_be(pos as u64, position_len(code_len))
}

/// A position message is empty exactly when the code has a single bit, in
/// which case the position is forced to 0.
fn decode_position(bits: &Bits, code_len: u32, context: &'static str) -> Result<usize, LeagueError> {
    let pos = bits.decode_be() as usize;
    if pos < code_len as usize {
        Ok(pos)
    } else {
        Err(LeagueError::MalformedMessage { context })
    }
}

fn decode_team_index(
    cfg: &LeagueConfig,
    bits: &Bits,
    context: &'static str,
) -> Result<u32, LeagueError> {
    let index = bits.decode_be() as u32;
    if index < cfg.teams_per_group() {
        Ok(index)
    } else {
        Err(LeagueError::MalformedMessage { context })
    }
}

/// The group of the pair whose code carries `bit` at `pos`. The two codes
/// differ there, so exactly one matches.
fn group_with_bit(
    cfg: &LeagueConfig,
    pair: (u32, u32),
    pos: usize,
    bit: u8,
) -> Result<u32, LeagueError> {
    let a = cfg.group_code(pair.0).bit(pos) == bit;
    let b = cfg.group_code(pair.1).bit(pos) == bit;
    match (a, b) {
        (true, false) => Ok(pair.0),
        (false, true) => Ok(pair.1),
        _ => Err(LeagueError::MalformedMessage {
            context: "group selection bit",
        }),
    }
}

fn other_group(pair: (u32, u32), group: u32) -> u32 {
    if group == pair.0 {
        pair.1
    } else {
        pair.0
    }
}

/// Non-interactive protocol: the team informant names one group, its team,
/// and the other group's team; the winner informant sends the winner's
/// enumeration code. The recipient never transmits.
pub fn run_no_interaction(
    cfg: &LeagueConfig,
    m: &MatchInstance,
) -> Result<ProtocolRun, LeagueError> {
    let ks = KnowledgeState::from_match(cfg, m)?;
    let mut t = Transcript::new();

    let (t1, t2) = ks.y_knows;
    t.push(Party::Y, cfg.group_code(t1.group), "first-team-group");
    t.push(Party::Y, cfg.team_code(t1.index), "first-team-index");
    t.push(Party::Y, cfg.team_code(t2.index), "second-team-index");
    t.push(Party::Z, cfg.enum_code(ks.z_knows), "winner-name");

    // recipient decodes from its group pair plus the four messages
    let g_named = t.messages[0].bits.decode_be() as u32;
    let g_other = if g_named == ks.x_knows.0 {
        ks.x_knows.1
    } else if g_named == ks.x_knows.1 {
        ks.x_knows.0
    } else {
        return Err(LeagueError::MalformedMessage {
            context: "announced group not in the known pair",
        });
    };
    let team_a = TeamRef {
        group: g_named,
        index: decode_team_index(cfg, &t.messages[1].bits, "first team index")?,
    };
    let team_b = TeamRef {
        group: g_other,
        index: decode_team_index(cfg, &t.messages[2].bits, "second team index")?,
    };
    let winner = cfg.team_from_enum(t.messages[3].bits.decode_be())?;
    if winner != team_a && winner != team_b {
        return Err(LeagueError::MalformedMessage {
            context: "winner outside the reconstructed match",
        });
    }

    Ok(ProtocolRun {
        reconstructed: MatchInstance::new(team_a, team_b, winner)?.canonical(),
        transcript: t,
    })
}

/// Interactive protocol with the team informant going first.
///
/// The recipient points at the first differing bit of the two group codes;
/// the team informant answers with that bit for its first team's group plus
/// both team indices. The recipient then points at the first differing bit of
/// the two teams' enumeration codes and the winner informant answers with the
/// winner's bit there.
pub fn run_y_first(cfg: &LeagueConfig, m: &MatchInstance) -> Result<ProtocolRun, LeagueError> {
    let ks = KnowledgeState::from_match(cfg, m)?;
    let mut t = Transcript::new();

    let pos_g = first_diff(
        &cfg.group_code(ks.x_knows.0),
        &cfg.group_code(ks.x_knows.1),
    )
    .expect("distinct groups have distinct codes");
    t.push(
        Party::X,
        encode_position(pos_g, cfg.group_code_len()),
        "group-diff-position",
    );

    let pos_y = decode_position(&t.messages[0].bits, cfg.group_code_len(), "group position")?;
    let (t1, t2) = ks.y_knows;
    t.push(
        Party::Y,
        Bits::single(cfg.group_code(t1.group).bit(pos_y)),
        "first-team-group-bit",
    );
    t.push(Party::Y, cfg.team_code(t1.index), "first-team-index");
    t.push(Party::Y, cfg.team_code(t2.index), "second-team-index");

    // recipient resolves both teams from messages 1..=3
    let g_first = group_with_bit(cfg, ks.x_knows, pos_g, t.messages[1].bits.bit(0))?;
    let g_second = other_group(ks.x_knows, g_first);
    let team_a = TeamRef {
        group: g_first,
        index: decode_team_index(cfg, &t.messages[2].bits, "first team index")?,
    };
    let team_b = TeamRef {
        group: g_second,
        index: decode_team_index(cfg, &t.messages[3].bits, "second team index")?,
    };
    let code_a = cfg.enum_code(team_a);
    let code_b = cfg.enum_code(team_b);
    let pos_t = first_diff(&code_a, &code_b).expect("distinct teams have distinct codes");
    t.push(
        Party::X,
        encode_position(pos_t, cfg.enum_code_len()),
        "team-diff-position",
    );

    let pos_z = decode_position(&t.messages[4].bits, cfg.enum_code_len(), "team position")?;
    t.push(
        Party::Z,
        Bits::single(cfg.enum_code(ks.z_knows).bit(pos_z)),
        "winner-code-bit",
    );

    let winner = if code_a.bit(pos_t) == t.messages[5].bits.bit(0) {
        team_a
    } else {
        team_b
    };

    Ok(ProtocolRun {
        reconstructed: MatchInstance::new(team_a, team_b, winner)?.canonical(),
        transcript: t,
    })
}

/// Interactive protocol with the winner informant going first.
///
/// The recipient points at the first differing bit of the two group codes;
/// the winner informant answers with the winner's group bit there plus the
/// winner's team index. The recipient then repeats the position together with
/// the remaining group's bit value, and the team informant identifies its
/// team in that group.
pub fn run_z_first(cfg: &LeagueConfig, m: &MatchInstance) -> Result<ProtocolRun, LeagueError> {
    let ks = KnowledgeState::from_match(cfg, m)?;
    let mut t = Transcript::new();

    let pos_g = first_diff(
        &cfg.group_code(ks.x_knows.0),
        &cfg.group_code(ks.x_knows.1),
    )
    .expect("distinct groups have distinct codes");
    t.push(
        Party::X,
        encode_position(pos_g, cfg.group_code_len()),
        "group-diff-position",
    );

    let pos_z = decode_position(&t.messages[0].bits, cfg.group_code_len(), "group position")?;
    t.push(
        Party::Z,
        Bits::single(cfg.group_code(ks.z_knows.group).bit(pos_z)),
        "winner-group-bit",
    );
    t.push(Party::Z, cfg.team_code(ks.z_knows.index), "winner-team-index");

    // recipient resolves the winner, then asks for the other group's team
    let g_winner = group_with_bit(cfg, ks.x_knows, pos_g, t.messages[1].bits.bit(0))?;
    let winner = TeamRef {
        group: g_winner,
        index: decode_team_index(cfg, &t.messages[2].bits, "winner team index")?,
    };
    let g_loser = other_group(ks.x_knows, g_winner);
    t.push(
        Party::X,
        encode_position(pos_g, cfg.group_code_len()),
        "group-diff-position",
    );
    t.push(
        Party::X,
        Bits::single(cfg.group_code(g_loser).bit(pos_g)),
        "remaining-group-bit",
    );

    let pos_y = decode_position(&t.messages[3].bits, cfg.group_code_len(), "group position")?;
    let (t1, t2) = ks.y_knows;
    let asked = if cfg.group_code(t1.group).bit(pos_y) == t.messages[4].bits.bit(0) {
        t1
    } else {
        t2
    };
    t.push(Party::Y, cfg.team_code(asked.index), "remaining-team-index");

    let loser = TeamRef {
        group: g_loser,
        index: decode_team_index(cfg, &t.messages[5].bits, "remaining team index")?,
    };

    Ok(ProtocolRun {
        reconstructed: MatchInstance::new(winner, loser, winner)?.canonical(),
        transcript: t,
    })
}

fn bits_of(kind: ProtocolKind, run: &ProtocolRun) -> ProtocolBits {
    let t = &run.transcript;
    ProtocolBits {
        protocol: kind,
        x_bits: t.party_bits(Party::X),
        y_bits: t.party_bits(Party::Y),
        z_bits: t.party_bits(Party::Z),
        total_bits: t.total_bits(),
        informant_bits: t.informant_bits(),
        grouped_messages: t.grouped_message_count(),
    }
}

/// Run all three protocols at the given sizes and report per-party bit
/// counts. Message lengths are fixed by the config, so any valid match
/// serves as the probe.
pub fn compare_orders(cfg: &LeagueConfig) -> Result<ComparisonReport, LeagueError> {
    let a = TeamRef { group: 0, index: 0 };
    let b = TeamRef { group: 1, index: 0 };
    let probe = MatchInstance::new(a, b, a)?;

    let runs = vec![
        bits_of(ProtocolKind::NoInteraction, &run_no_interaction(cfg, &probe)?),
        bits_of(ProtocolKind::YFirst, &run_y_first(cfg, &probe)?),
        bits_of(ProtocolKind::ZFirst, &run_z_first(cfg, &probe)?),
    ];
    let order_dependent = runs[1].total_bits != runs[2].total_bits;
    Ok(ComparisonReport {
        runs,
        order_dependent,
    })
}
