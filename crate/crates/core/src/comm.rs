//! Communication metrics over exported chat logs: verbosity, per-role
//! verbosity, response latency, and length-normalized token entropy per turn.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{count, lit, Scalar};

/// Header of the chat-log CSV, in order.
pub const LOG_HEADER: [&str; 6] = ["timestamp", "group", "session", "turn_index", "role", "text"];

#[derive(Debug, Error)]
pub enum CommError {
    #[error("empty log")]
    EmptyLog,
    #[error("no user→assistant pairs")]
    NoPairs,
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("session {session}: {reason}")]
    Inconsistent { session: String, reason: String },
    #[error("smoothing window must be at least 1")]
    BadWindow,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

impl Role {
    pub fn parse(s: &str) -> Option<Role> {
        match s.trim().to_ascii_lowercase().as_str() {
            "user" => Some(Role::User),
            "assistant" => Some(Role::Assistant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommMessage {
    pub timestamp: DateTime<FixedOffset>,
    pub group: String,
    pub session: String,
    pub turn_index: u64,
    pub role: Role,
    pub text: String,
}

impl CommMessage {
    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseMode {
    /// Each assistant message paired with the nearest preceding unconsumed user message.
    #[default]
    UserToAssistant,
    /// Every gap between consecutive messages of a session.
    AnyGap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommReport<T> {
    pub group: String,
    pub message_count: usize,
    pub avg_words_per_message: T,
    pub messages_by_role: BTreeMap<Role, usize>,
    pub avg_words_by_role: BTreeMap<Role, T>,
    /// `None` when the group has no message pairs to measure.
    pub avg_response_time_s: Option<T>,
    pub density_by_turn: Vec<DensityPoint<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint<T> {
    pub turn_index: u64,
    pub adjusted_density: T,
}

/// Reads the chat-log CSV. The header must match `LOG_HEADER` exactly.
pub fn read_log<R: Read>(reader: R) -> Result<Vec<CommMessage>, CommError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != LOG_HEADER {
        return Err(CommError::Schema(format!(
            "expected header {:?}, found {:?}",
            LOG_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec?;
        let bad = |reason: String| CommError::BadRow { row, reason };
        let timestamp =
            DateTime::parse_from_rfc3339(rec[0].trim()).map_err(|e| bad(format!("timestamp {:?}: {e}", &rec[0])))?;
        let turn_index = rec[3].trim().parse().map_err(|_| bad(format!("turn_index {:?}", &rec[3])))?;
        let role = Role::parse(&rec[4]).ok_or_else(|| bad(format!("role {:?}", &rec[4])))?;
        out.push(CommMessage {
            timestamp,
            group: rec[1].to_string(),
            session: rec[2].to_string(),
            turn_index,
            role,
            text: rec[5].to_string(),
        });
    }
    Ok(out)
}

/// Sorts by (group, session, turn_index, timestamp) and checks that turn
/// indices are unique and move forward in time within each session.
pub fn canonicalize(mut messages: Vec<CommMessage>) -> Result<Vec<CommMessage>, CommError> {
    messages.sort_by(|a, b| {
        (&a.group, &a.session, a.turn_index, a.timestamp).cmp(&(&b.group, &b.session, b.turn_index, b.timestamp))
    });
    for w in messages.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.group != b.group || a.session != b.session {
            continue;
        }
        if a.turn_index == b.turn_index {
            return Err(CommError::Inconsistent {
                session: a.session.clone(),
                reason: format!("duplicate turn_index {}", a.turn_index),
            });
        }
        if b.timestamp < a.timestamp {
            return Err(CommError::Inconsistent {
                session: a.session.clone(),
                reason: format!("turn {} is earlier than turn {}", b.turn_index, a.turn_index),
            });
        }
    }
    Ok(messages)
}

/// Mean whitespace-token count per message.
pub fn avg_words<T: Scalar>(messages: &[CommMessage]) -> Result<T, CommError> {
    if messages.is_empty() {
        return Err(CommError::EmptyLog);
    }
    let words: usize = messages.iter().map(CommMessage::word_count).sum();
    Ok(count::<T>(words) / count::<T>(messages.len()))
}

/// Mean word count per role; roles without messages are absent.
pub fn words_by_role<T: Scalar>(messages: &[CommMessage]) -> Result<BTreeMap<Role, T>, CommError> {
    if messages.is_empty() {
        return Err(CommError::EmptyLog);
    }
    Ok(role_tallies(messages).into_iter().map(|(role, (n, words))| (role, count::<T>(words) / count::<T>(n))).collect())
}

fn role_tallies(messages: &[CommMessage]) -> BTreeMap<Role, (usize, usize)> {
    let mut tally: BTreeMap<Role, (usize, usize)> = BTreeMap::new();
    for m in messages {
        let e = tally.entry(m.role).or_default();
        e.0 += 1;
        e.1 += m.word_count();
    }
    tally
}

fn seconds_between<T: Scalar>(a: DateTime<FixedOffset>, b: DateTime<FixedOffset>) -> T {
    let d = b.signed_duration_since(a);
    let nanos = d.num_nanoseconds().map(|n| n as f64 / 1e9).unwrap_or(d.num_seconds() as f64);
    lit(nanos)
}

/// Mean response latency in seconds.
///
/// Messages are grouped by session and taken in (turn_index, timestamp)
/// order. Under `UserToAssistant` each assistant message consumes the most
/// recent unconsumed user message of its session.
pub fn avg_response_time<T: Scalar>(messages: &[CommMessage], mode: ResponseMode) -> Result<T, CommError> {
    let mut sessions: BTreeMap<(&str, &str), Vec<&CommMessage>> = BTreeMap::new();
    for m in messages {
        sessions.entry((&m.group, &m.session)).or_default().push(m);
    }
    let mut deltas: Vec<T> = Vec::new();
    for msgs in sessions.values_mut() {
        msgs.sort_by_key(|m| (m.turn_index, m.timestamp));
        match mode {
            ResponseMode::UserToAssistant => {
                let mut waiting: Vec<&CommMessage> = Vec::new();
                for m in msgs.iter() {
                    match m.role {
                        Role::User => waiting.push(m),
                        Role::Assistant => {
                            if let Some(u) = waiting.pop() {
                                deltas.push(seconds_between(u.timestamp, m.timestamp));
                            }
                        }
                    }
                }
            }
            ResponseMode::AnyGap => {
                for w in msgs.windows(2) {
                    deltas.push(seconds_between(w[0].timestamp, w[1].timestamp));
                }
            }
        }
    }
    if deltas.is_empty() {
        return Err(CommError::NoPairs);
    }
    Ok(deltas.iter().copied().sum::<T>() / count(deltas.len()))
}

/// Token entropy divided by `log2(1 + n)` for `n` lowercased whitespace tokens.
pub fn adjusted_density<T: Scalar>(text: &str) -> T {
    let tokens: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
    let n = tokens.len();
    if n <= 1 {
        return T::zero();
    }
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &tokens {
        *freq.entry(t).or_insert(0) += 1;
    }
    let counts: Vec<usize> = freq.into_values().collect();
    let h = crate::metrics::shannon_entropy::<T>(&counts, count(n));
    (h / count::<T>(n + 1).log2()).max(T::zero())
}

/// Mean adjusted density per turn index across sessions, smoothed with a
/// trailing moving average over `window` consecutive turn indices.
pub fn density_evolution<T: Scalar>(messages: &[CommMessage], window: usize) -> Result<Vec<(u64, T)>, CommError> {
    if window == 0 {
        return Err(CommError::BadWindow);
    }
    if messages.is_empty() {
        return Err(CommError::EmptyLog);
    }
    let mut per_turn: BTreeMap<u64, Vec<T>> = BTreeMap::new();
    for m in messages {
        per_turn.entry(m.turn_index).or_default().push(adjusted_density(&m.text));
    }
    let raw: Vec<(u64, T)> =
        per_turn.into_iter().map(|(turn, ds)| (turn, ds.iter().copied().sum::<T>() / count(ds.len()))).collect();
    Ok(raw
        .iter()
        .enumerate()
        .map(|(i, &(turn, _))| {
            let lo = (i + 1).saturating_sub(window);
            let slice = &raw[lo..=i];
            (turn, slice.iter().map(|&(_, v)| v).sum::<T>() / count(slice.len()))
        })
        .collect())
}

/// One report per group, in group-name order.
pub fn comm_reports<T: Scalar>(
    messages: Vec<CommMessage>,
    window: usize,
    mode: ResponseMode,
) -> Result<Vec<CommReport<T>>, CommError> {
    if messages.is_empty() {
        return Err(CommError::EmptyLog);
    }
    let messages = canonicalize(messages)?;
    let mut groups: BTreeMap<String, Vec<CommMessage>> = BTreeMap::new();
    for m in messages {
        groups.entry(m.group.clone()).or_default().push(m);
    }
    groups
        .into_iter()
        .map(|(group, msgs)| {
            let avg_response_time_s = match avg_response_time(&msgs, mode) {
                Ok(v) => Some(v),
                Err(CommError::NoPairs) => None,
                Err(e) => return Err(e),
            };
            Ok(CommReport {
                message_count: msgs.len(),
                avg_words_per_message: avg_words(&msgs)?,
                messages_by_role: role_tallies(&msgs).into_iter().map(|(r, (n, _))| (r, n)).collect(),
                avg_words_by_role: words_by_role(&msgs)?,
                avg_response_time_s,
                density_by_turn: density_evolution(&msgs, window)?
                    .into_iter()
                    .map(|(turn_index, adjusted_density)| DensityPoint { turn_index, adjusted_density })
                    .collect(),
                group,
            })
        })
        .collect()
}
