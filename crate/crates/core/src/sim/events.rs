use std::io::{self, Write};

use thiserror::Error;

use crate::routing::{HostId, MessageId};

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    MessageCreated { id: MessageId, source: HostId, destination: HostId, size: u64 },
    TransferStarted { id: MessageId, from: HostId, to: HostId },
    TransferRelayed { id: MessageId, from: HostId, to: HostId },
    TransferAborted { id: MessageId, from: HostId, to: HostId },
    MessageDropped { id: MessageId, host: HostId, received_at: f64 },
    MessageRemoved { id: MessageId, host: HostId, received_at: f64 },
    MessageDelivered { id: MessageId, from: HostId, to: HostId, hops: u32, created_at: f64 },
    ConnectionUp { a: HostId, b: HostId },
    ConnectionDown { a: HostId, b: HostId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    pub kind: EventKind,
}

impl SimEvent {
    pub fn new(time: f64, kind: EventKind) -> Self {
        SimEvent { time, kind }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            EventKind::MessageCreated { .. } => "MessageCreated",
            EventKind::TransferStarted { .. } => "TransferStarted",
            EventKind::TransferRelayed { .. } => "TransferRelayed",
            EventKind::TransferAborted { .. } => "TransferAborted",
            EventKind::MessageDropped { .. } => "MessageDropped",
            EventKind::MessageRemoved { .. } => "MessageRemoved",
            EventKind::MessageDelivered { .. } => "MessageDelivered",
            EventKind::ConnectionUp { .. } => "ConnectionUp",
            EventKind::ConnectionDown { .. } => "ConnectionDown",
        }
    }
}

#[derive(Debug, Error)]
pub enum SinkError {
    #[error("event at {got} arrived after an event at {previous}")]
    OutOfOrder { previous: f64, got: f64 },
    #[error("writing event log: {0}")]
    Io(#[from] io::Error),
}

/// Consumer of the event stream produced by a tick.
pub trait EventSink {
    fn emit(&mut self, event: &SimEvent) -> Result<(), SinkError>;
}

impl EventSink for Vec<SimEvent> {
    fn emit(&mut self, event: &SimEvent) -> Result<(), SinkError> {
        self.push(event.clone());
        Ok(())
    }
}

/// Discards everything.
pub struct NullSink;

impl EventSink for NullSink {
    fn emit(&mut self, _: &SimEvent) -> Result<(), SinkError> {
        Ok(())
    }
}

impl<A: EventSink, B: EventSink> EventSink for (A, B) {
    fn emit(&mut self, event: &SimEvent) -> Result<(), SinkError> {
        self.0.emit(event)?;
        self.1.emit(event)
    }
}

impl<S: EventSink + ?Sized> EventSink for &mut S {
    fn emit(&mut self, event: &SimEvent) -> Result<(), SinkError> {
        (**self).emit(event)
    }
}

impl<S: EventSink> EventSink for Option<S> {
    fn emit(&mut self, event: &SimEvent) -> Result<(), SinkError> {
        match self {
            Some(s) => s.emit(event),
            None => Ok(()),
        }
    }
}

/// One tab-separated line: time, kind, then the subject fields.
pub fn format_event(event: &SimEvent, names: &[String], prefix: &str) -> String {
    let n = |h: HostId| names.get(h.index()).map_or("?", String::as_str);
    let t = event.time;
    let k = event.name();
    match &event.kind {
        EventKind::MessageCreated { id, source, destination, size } => {
            format!("{t}\t{k}\t{prefix}{}\t{}\t{}\t{size}", id.0, n(*source), n(*destination))
        }
        EventKind::TransferStarted { id, from, to }
        | EventKind::TransferRelayed { id, from, to }
        | EventKind::TransferAborted { id, from, to } => {
            format!("{t}\t{k}\t{prefix}{}\t{}\t{}", id.0, n(*from), n(*to))
        }
        EventKind::MessageDropped { id, host, received_at }
        | EventKind::MessageRemoved { id, host, received_at } => {
            format!("{t}\t{k}\t{prefix}{}\t{}\t{received_at}", id.0, n(*host))
        }
        EventKind::MessageDelivered { id, from, to, hops, created_at } => {
            format!("{t}\t{k}\t{prefix}{}\t{}\t{}\t{hops}\t{created_at}", id.0, n(*from), n(*to))
        }
        EventKind::ConnectionUp { a, b } | EventKind::ConnectionDown { a, b } => {
            format!("{t}\t{k}\t{}\t{}", n(*a), n(*b))
        }
    }
}

/// Writes the serialized event stream.
pub struct EventLogWriter<W: Write> {
    out: W,
    names: Vec<String>,
    prefix: String,
}

impl<W: Write> EventLogWriter<W> {
    pub fn new(out: W, names: Vec<String>, prefix: impl Into<String>) -> Self {
        EventLogWriter {
            out,
            names,
            prefix: prefix.into(),
        }
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> EventSink for EventLogWriter<W> {
    fn emit(&mut self, event: &SimEvent) -> Result<(), SinkError> {
        writeln!(self.out, "{}", format_event(event, &self.names, &self.prefix))?;
        Ok(())
    }
}
