//! Per-channel sliding-window averages of message valence and emotion.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::resolve_labels;
use crate::label::EmotionLabel;

pub const DEFAULT_WINDOW_SECS: f64 = 300.0;
pub const DEFAULT_CAPACITY: usize = 10_000;
pub const MAX_CHANNEL_ID_BYTES: usize = 128;

#[derive(Debug, Error, PartialEq)]
pub enum AggregatorError {
    #[error("channel id must be 1 to {MAX_CHANNEL_ID_BYTES} bytes")]
    BadChannelId,
    #[error("timestamp {0} is not finite")]
    BadTimestamp(f64),
    #[error("score {0} outside [-1, 1]")]
    BadScore(f64),
    #[error("window {0} must be positive and finite")]
    BadWindow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub t: f64,
    pub score: f64,
    pub emotion: EmotionLabel,
}

impl Message {
    /// Total order used for storage, so contents never depend on arrival
    /// order.
    fn key(&self) -> (f64, f64, usize) {
        (self.t, self.score, self.emotion.index())
    }

    fn before(&self, other: &Message) -> bool {
        let (a, b) = (self.key(), other.key());
        a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)).is_le()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeReading {
    /// 0 when the window is empty.
    pub mean: f64,
    pub count: usize,
    pub empty: bool,
    /// Exclusive lower bound.
    pub from: f64,
    /// Inclusive upper bound.
    pub to: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominantEmotion {
    pub label: EmotionLabel,
    /// Counts in [`EmotionLabel::ALL`] order.
    pub histogram: [usize; 7],
}

fn check_window(window: f64) -> Result<(), AggregatorError> {
    if window.is_finite() && window > 0.0 {
        Ok(())
    } else {
        Err(AggregatorError::BadWindow(window))
    }
}

/// Messages of one channel, kept sorted by time.
#[derive(Debug, Clone)]
pub struct ChannelState {
    messages: VecDeque<Message>,
    capacity: usize,
}

impl ChannelState {
    pub fn new(capacity: usize) -> Self {
        ChannelState {
            messages: VecDeque::new(),
            capacity: capacity.max(1),
        }
    }

    /// Inserts in order; late arrivals are accepted. When full, the oldest
    /// message is evicted.
    pub fn add(&mut self, message: Message) -> Result<(), AggregatorError> {
        if !message.t.is_finite() {
            return Err(AggregatorError::BadTimestamp(message.t));
        }
        if !(-1.0..=1.0).contains(&message.score) {
            return Err(AggregatorError::BadScore(message.score));
        }
        let message = Message {
            score: message.score + 0.0,
            ..message
        };
        let at = self.messages.partition_point(|m| m.before(&message));
        self.messages.insert(at, message);
        if self.messages.len() > self.capacity {
            self.messages.pop_front();
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn messages(&self) -> impl Iterator<Item = &Message> {
        self.messages.iter()
    }

    /// Messages with `now - window < t <= now`.
    pub fn window(&self, window: f64, now: f64) -> impl Iterator<Item = &Message> {
        let from = now - window;
        let lo = self.messages.partition_point(|m| m.t <= from);
        let hi = self.messages.partition_point(|m| m.t <= now);
        self.messages.range(lo..hi.max(lo))
    }

    pub fn gauge(&self, window: f64, now: f64) -> Result<GaugeReading, AggregatorError> {
        check_window(window)?;
        let (mut sum, mut count) = (0.0, 0usize);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for m in self.window(window, now) {
            sum += m.score;
            count += 1;
            lo = lo.min(m.score);
            hi = hi.max(m.score);
        }
        let mean = if count == 0 { 0.0 } else { (sum / count as f64).clamp(lo, hi) };
        Ok(GaugeReading {
            mean,
            count,
            empty: count == 0,
            from: now - window,
            to: now,
        })
    }

    pub fn dominant_emotion(&self, window: f64, now: f64) -> Result<DominantEmotion, AggregatorError> {
        check_window(window)?;
        let mut histogram = [0usize; 7];
        let mut labels = Vec::new();
        for m in self.window(window, now) {
            histogram[m.emotion.index()] += 1;
            labels.push(m.emotion);
        }
        Ok(DominantEmotion {
            label: resolve_labels(labels).label,
            histogram,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregatorConfig {
    pub window: f64,
    pub capacity: usize,
}

impl Default for AggregatorConfig {
    fn default() -> Self {
        AggregatorConfig {
            window: DEFAULT_WINDOW_SECS,
            capacity: DEFAULT_CAPACITY,
        }
    }
}

/// Thread-safe map of channels. Each channel has its own lock.
#[derive(Debug, Default)]
pub struct Aggregator {
    config: AggregatorConfig,
    channels: RwLock<HashMap<String, Arc<RwLock<ChannelState>>>>,
}

fn check_id(id: &str) -> Result<(), AggregatorError> {
    if id.is_empty() || id.len() > MAX_CHANNEL_ID_BYTES {
        Err(AggregatorError::BadChannelId)
    } else {
        Ok(())
    }
}

impl Aggregator {
    pub fn new(config: AggregatorConfig) -> Self {
        Aggregator {
            config,
            channels: RwLock::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> AggregatorConfig {
        self.config
    }

    fn channel(&self, id: &str) -> Option<Arc<RwLock<ChannelState>>> {
        self.channels.read().get(id).cloned()
    }

    pub fn add_message(&self, id: &str, message: Message) -> Result<usize, AggregatorError> {
        check_id(id)?;
        let channel = match self.channel(id) {
            Some(c) => c,
            None => self
                .channels
                .write()
                .entry(id.to_owned())
                .or_insert_with(|| Arc::new(RwLock::new(ChannelState::new(self.config.capacity))))
                .clone(),
        };
        let mut state = channel.write();
        state.add(message)?;
        Ok(state.len())
    }

    /// Reading for `id`; unknown channels read as empty.
    pub fn gauge(&self, id: &str, window: Option<f64>, now: f64) -> Result<GaugeReading, AggregatorError> {
        check_id(id)?;
        let window = window.unwrap_or(self.config.window);
        match self.channel(id) {
            Some(c) => c.read().gauge(window, now),
            None => ChannelState::new(1).gauge(window, now),
        }
    }

    pub fn dominant_emotion(&self, id: &str, window: Option<f64>, now: f64) -> Result<DominantEmotion, AggregatorError> {
        check_id(id)?;
        let window = window.unwrap_or(self.config.window);
        match self.channel(id) {
            Some(c) => c.read().dominant_emotion(window, now),
            None => ChannelState::new(1).dominant_emotion(window, now),
        }
    }

    /// Timestamp of the newest message in `id`.
    pub fn latest(&self, id: &str) -> Option<f64> {
        self.channel(id)?.read().messages.back().map(|m| m.t)
    }
}
