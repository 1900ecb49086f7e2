//! Length-prefixed binary framing between the offloading proxy and the
//! remote execution manager.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "P2CL"
//!      4     1  version (1)
//!      5     1  kind: 1 request, 2 response, 3 error
//!      6     1  application id
//!      7     8  payload length, u64 big-endian
//!     15     n  payload
//! ```
//!
//! Error frames carry a UTF-8 reason as payload.

use std::io::{self, Read, Write};

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"P2CL";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 15;
/// Largest payload accepted when nothing else is configured: 256 MiB.
pub const DEFAULT_MAX_PAYLOAD: u64 = 256 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum FrameKind {
    Request = 1,
    Response = 2,
    Error = 3,
}

impl FrameKind {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(Self::Request),
            2 => Some(Self::Response),
            3 => Some(Self::Error),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub kind: FrameKind,
    pub application_id: u8,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn request(application_id: u8, payload: Vec<u8>) -> Self {
        Self {
            kind: FrameKind::Request,
            application_id,
            payload,
        }
    }

    pub fn response(application_id: u8, payload: Vec<u8>) -> Self {
        Self {
            kind: FrameKind::Response,
            application_id,
            payload,
        }
    }

    pub fn error(application_id: u8, reason: &str) -> Self {
        Self {
            kind: FrameKind::Error,
            application_id,
            payload: reason.as_bytes().to_vec(),
        }
    }

    /// Reason text of an error frame (lossy for non-UTF-8 payloads).
    pub fn reason(&self) -> String {
        String::from_utf8_lossy(&self.payload).into_owned()
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&encode_header(
            self.kind,
            self.application_id,
            self.payload.len() as u64,
        ));
        out.extend_from_slice(&self.payload);
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("incomplete frame: need {needed} more byte(s)")]
    Incomplete { needed: u64 },
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported protocol version {0}")]
    BadVersion(u8),
    #[error("unknown frame kind {0}")]
    BadKind(u8),
    #[error("declared payload of {declared} bytes exceeds limit of {limit}")]
    PayloadTooLarge { declared: u64, limit: u64 },
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("connection closed")]
    Closed,
    #[error("transport error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub kind: FrameKind,
    pub application_id: u8,
    pub payload_length: u64,
}

pub fn encode_header(kind: FrameKind, application_id: u8, payload_length: u64) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[..4].copy_from_slice(&MAGIC);
    h[4] = VERSION;
    h[5] = kind as u8;
    h[6] = application_id;
    h[7..].copy_from_slice(&payload_length.to_be_bytes());
    h
}

/// Validates the fixed header. `buf` may be shorter than [`HEADER_LEN`];
/// the bytes present are still checked so garbage is rejected early.
pub fn decode_header(buf: &[u8], max_payload: u64) -> Result<Header, FrameError> {
    let magic_seen = buf.len().min(4);
    if buf[..magic_seen] != MAGIC[..magic_seen] {
        return Err(FrameError::BadMagic);
    }
    if let Some(&v) = buf.get(4) {
        if v != VERSION {
            return Err(FrameError::BadVersion(v));
        }
    }
    if let Some(&k) = buf.get(5) {
        if FrameKind::from_byte(k).is_none() {
            return Err(FrameError::BadKind(k));
        }
    }
    if buf.len() < HEADER_LEN {
        return Err(FrameError::Incomplete {
            needed: (HEADER_LEN - buf.len()) as u64,
        });
    }
    let kind = FrameKind::from_byte(buf[5]).ok_or(FrameError::BadKind(buf[5]))?;
    let mut len = [0u8; 8];
    len.copy_from_slice(&buf[7..HEADER_LEN]);
    let payload_length = u64::from_be_bytes(len);
    if payload_length > max_payload {
        return Err(FrameError::PayloadTooLarge {
            declared: payload_length,
            limit: max_payload,
        });
    }
    Ok(Header {
        kind,
        application_id: buf[6],
        payload_length,
    })
}

/// Decodes one frame from the front of `buf`, returning it with the number
/// of bytes consumed.
pub fn decode(buf: &[u8], max_payload: u64) -> Result<(Frame, usize), FrameError> {
    let header = decode_header(buf, max_payload)?;
    let available = (buf.len() - HEADER_LEN) as u64;
    if available < header.payload_length {
        return Err(FrameError::Incomplete {
            needed: header.payload_length - available,
        });
    }
    // payload_length <= available <= usize::MAX here.
    let end = HEADER_LEN + header.payload_length as usize;
    Ok((
        Frame {
            kind: header.kind,
            application_id: header.application_id,
            payload: buf[HEADER_LEN..end].to_vec(),
        },
        end,
    ))
}

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> io::Result<()> {
    w.write_all(&encode_header(
        frame.kind,
        frame.application_id,
        frame.payload.len() as u64,
    ))?;
    w.write_all(&frame.payload)?;
    w.flush()
}

/// Reads one frame. A clean EOF before the first header byte is
/// [`ProtocolError::Closed`]; EOF anywhere else is a truncated frame.
pub fn read_frame<R: Read>(r: &mut R, max_payload: u64) -> Result<Frame, ProtocolError> {
    let mut header = [0u8; HEADER_LEN];
    let mut filled = 0;
    while filled < HEADER_LEN {
        match r.read(&mut header[filled..]) {
            Ok(0) if filled == 0 => return Err(ProtocolError::Closed),
            Ok(0) => {
                return Err(FrameError::Incomplete {
                    needed: (HEADER_LEN - filled) as u64,
                }
                .into())
            }
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    let header = decode_header(&header, max_payload)?;
    let mut payload = Vec::new();
    let got = r
        .by_ref()
        .take(header.payload_length)
        .read_to_end(&mut payload)? as u64;
    if got < header.payload_length {
        return Err(FrameError::Incomplete {
            needed: header.payload_length - got,
        }
        .into());
    }
    Ok(Frame {
        kind: header.kind,
        application_id: header.application_id,
        payload,
    })
}
