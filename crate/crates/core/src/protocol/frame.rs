use std::io::{self, Read, Write};

use super::{Message, ProtocolError};

/// Largest accepted frame body.
pub const MAX_FRAME_LEN: usize = 16 * 1024 * 1024;

const PREFIX: usize = 4;

/// Length-prefixes `body`.
pub fn encode_frame(body: &[u8]) -> Result<Vec<u8>, ProtocolError> {
    if body.len() > MAX_FRAME_LEN {
        return Err(ProtocolError::Oversize(body.len() as u64));
    }
    let mut out = Vec::with_capacity(PREFIX + body.len());
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(body);
    Ok(out)
}

/// Splits one frame off the front of `bytes`, returning its body and the rest.
pub fn split_frame(bytes: &[u8]) -> Result<(&[u8], &[u8]), ProtocolError> {
    if bytes.len() < PREFIX {
        return Err(ProtocolError::Truncated {
            expected: PREFIX as u64,
            got: bytes.len() as u64,
        });
    }
    let len = u32::from_be_bytes(bytes[..PREFIX].try_into().expect("four bytes")) as usize;
    if len > MAX_FRAME_LEN {
        return Err(ProtocolError::Oversize(len as u64));
    }
    let rest = &bytes[PREFIX..];
    if rest.len() < len {
        return Err(ProtocolError::Truncated {
            expected: len as u64,
            got: rest.len() as u64,
        });
    }
    Ok(rest.split_at(len))
}

pub fn encode(m: &Message) -> Result<Vec<u8>, ProtocolError> {
    let body = serde_json::to_vec(m).map_err(|e| ProtocolError::Schema(e.to_string()))?;
    encode_frame(&body)
}

/// Decodes exactly one complete frame; trailing bytes are an error.
pub fn decode(bytes: &[u8]) -> Result<Message, ProtocolError> {
    let (body, rest) = split_frame(bytes)?;
    if !rest.is_empty() {
        return Err(ProtocolError::Malformed(format!("{} bytes after the frame", rest.len())));
    }
    decode_body(body)
}

/// Parses a frame body, classifying failures as malformed JSON, unknown
/// message type, or schema violation.
pub fn decode_body(body: &[u8]) -> Result<Message, ProtocolError> {
    let text = std::str::from_utf8(body).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    let kind = value
        .get("type")
        .ok_or_else(|| ProtocolError::Schema("missing `type`".into()))?
        .as_str()
        .ok_or_else(|| ProtocolError::Schema("`type` is not a string".into()))?;
    if !Message::TYPES.contains(&kind) {
        return Err(ProtocolError::UnknownType(kind.to_string()));
    }
    serde_json::from_value(value).map_err(|e| ProtocolError::Schema(e.to_string()))
}

/// Reads one frame body. `Ok(None)` means the peer closed before a new frame began.
pub fn read_frame(r: &mut impl Read) -> Result<Option<Vec<u8>>, ProtocolError> {
    let mut prefix = [0u8; PREFIX];
    let got = read_full(r, &mut prefix)?;
    if got == 0 {
        return Ok(None);
    }
    if got < PREFIX {
        return Err(ProtocolError::Truncated {
            expected: PREFIX as u64,
            got: got as u64,
        });
    }
    let len = u32::from_be_bytes(prefix) as usize;
    if len > MAX_FRAME_LEN {
        return Err(ProtocolError::Oversize(len as u64));
    }
    let mut body = vec![0u8; len];
    let got = read_full(r, &mut body)?;
    if got < len {
        return Err(ProtocolError::Truncated {
            expected: len as u64,
            got: got as u64,
        });
    }
    Ok(Some(body))
}

fn read_full(r: &mut impl Read, buf: &mut [u8]) -> Result<usize, ProtocolError> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(ProtocolError::Io(e.to_string())),
        }
    }
    Ok(filled)
}

pub fn read_message(r: &mut impl Read) -> Result<Option<Message>, ProtocolError> {
    read_frame(r)?.map(|b| decode_body(&b)).transpose()
}

pub fn write_message(w: &mut impl Write, m: &Message) -> Result<(), ProtocolError> {
    let frame = encode(m)?;
    w.write_all(&frame).and_then(|_| w.flush()).map_err(|e| ProtocolError::Io(e.to_string()))
}
