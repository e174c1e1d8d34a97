//! Classical wire format. A frame is a big-endian `u32` byte length followed
//! by the JSON message `{version, role, payload}`; matrices travel as base64
//! blobs inside the payload.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::commitment::{
    committer_commit, receiver_sample_pauli, reveal_verify, CommitmentTranscript, Opening, RevealOutcome,
};
use super::otp::Ciphertext;
use super::params::ProtocolParams;
use crate::error::{Error, Result};
use crate::quantum::PauliString;
use crate::rng::SimRng;
use crate::tomography::Tomograph;

pub const WIRE_VERSION: u32 = 1;

/// Frames above this size are refused before allocation.
pub const MAX_FRAME_BYTES: u32 = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Receiver,
    Committer,
    Sender,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
// Externally tagged: internally tagged enums cannot carry u128 copy counts.
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Challenge { params: ProtocolParams, pauli: PauliString },
    Commitment { tomographs: Vec<Tomograph> },
    Opening(Opening),
    Ciphertext(Ciphertext),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub version: u32,
    pub role: Role,
    pub payload: Payload,
}

impl Message {
    pub fn new(role: Role, payload: Payload) -> Self {
        Self {
            version: WIRE_VERSION,
            role,
            payload,
        }
    }
}

/// SHA-256 of the canonical JSON serialization.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> [u8; 32] {
    let bytes = serde_json::to_vec(value).expect("protocol values always serialize");
    Sha256::digest(bytes).into()
}

pub fn digest_hex<T: Serialize + ?Sized>(value: &T) -> String {
    hex::encode(digest(value))
}

pub fn encode_frame(msg: &Message) -> Result<Vec<u8>> {
    let body = serde_json::to_vec(msg)?;
    let len = u32::try_from(body.len())
        .ok()
        .filter(|&l| l <= MAX_FRAME_BYTES)
        .ok_or_else(|| Error::Codec(format!("frame of {} bytes is too large", body.len())))?;
    let mut out = Vec::with_capacity(4 + body.len());
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(&body);
    Ok(out)
}

/// Decodes exactly one frame occupying all of `bytes`.
pub fn decode_frame(bytes: &[u8]) -> Result<Message> {
    let mut cursor = bytes;
    let msg = read_message(&mut cursor)?;
    if !cursor.is_empty() {
        return Err(Error::Codec(format!("{} trailing bytes after frame", cursor.len())));
    }
    Ok(msg)
}

pub fn write_message<W: Write>(w: &mut W, msg: &Message) -> Result<()> {
    w.write_all(&encode_frame(msg)?)?;
    w.flush()?;
    Ok(())
}

pub fn read_message<R: Read>(r: &mut R) -> Result<Message> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_be_bytes(len);
    if len > MAX_FRAME_BYTES {
        return Err(Error::Codec(format!("frame length {len} exceeds limit")));
    }
    let mut body = vec![0u8; len as usize];
    r.read_exact(&mut body)?;
    let msg: Message = serde_json::from_slice(&body)?;
    if msg.version != WIRE_VERSION {
        return Err(Error::Codec(format!("unsupported wire version {}", msg.version)));
    }
    Ok(msg)
}

fn unexpected(what: &str, msg: &Message) -> Error {
    Error::Codec(format!("expected {what}, received {:?} from {:?}", std::mem::discriminant(&msg.payload), msg.role))
}

/// Receiver side of a commitment session.
#[derive(Debug)]
pub struct Receiver {
    params: ProtocolParams,
    rng: SimRng,
    transcript: Option<CommitmentTranscript>,
    pauli: Option<PauliString>,
}

impl Receiver {
    pub fn new(params: ProtocolParams, rng: SimRng) -> Self {
        Self {
            params,
            rng,
            transcript: None,
            pauli: None,
        }
    }

    pub fn challenge(&mut self) -> Message {
        let pauli = receiver_sample_pauli(&self.params, &mut self.rng);
        self.pauli = Some(pauli.clone());
        Message::new(Role::Receiver, Payload::Challenge { params: self.params, pauli })
    }

    pub fn receive_commitment(&mut self, msg: &Message) -> Result<()> {
        let (Payload::Commitment { tomographs }, Some(pauli)) = (&msg.payload, &self.pauli) else {
            return Err(unexpected("a commitment after the challenge", msg));
        };
        self.transcript = Some(CommitmentTranscript {
            params: self.params,
            pauli: pauli.clone(),
            tomographs: tomographs.clone(),
        });
        Ok(())
    }

    pub fn transcript(&self) -> Option<&CommitmentTranscript> {
        self.transcript.as_ref()
    }

    pub fn receive_opening(&self, msg: &Message) -> Result<RevealOutcome> {
        let (Payload::Opening(opening), Some(t)) = (&msg.payload, &self.transcript) else {
            return Err(unexpected("an opening after the commitment", msg));
        };
        Ok(reveal_verify(t, opening))
    }
}

/// Honest committer side of a commitment session.
#[derive(Debug)]
pub struct Committer {
    b: bool,
    rng: SimRng,
    opening: Option<Opening>,
}

impl Committer {
    pub fn new(b: bool, rng: SimRng) -> Self {
        Self { b, rng, opening: None }
    }

    pub fn respond(&mut self, challenge: &Message) -> Result<Message> {
        let Payload::Challenge { params, pauli } = &challenge.payload else {
            return Err(unexpected("a challenge", challenge));
        };
        let (opening, t) = committer_commit(self.b, pauli, params, &mut self.rng)?;
        self.opening = Some(opening);
        Ok(Message::new(Role::Committer, Payload::Commitment { tomographs: t.tomographs }))
    }

    pub fn open(&self) -> Result<Message> {
        let opening = self.opening.clone().ok_or_else(|| Error::domain("nothing committed yet"))?;
        Ok(Message::new(Role::Committer, Payload::Opening(opening)))
    }
}

/// Outcome of a full session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub outcome: RevealOutcome,
    /// Opening as received by the receiver.
    pub opening: Opening,
    pub transcript: CommitmentTranscript,
    pub transcript_digest: String,
    pub bytes_exchanged: usize,
}

fn relay(msg: &Message, counter: &mut usize) -> Result<Message> {
    let frame = encode_frame(msg)?;
    *counter += frame.len();
    decode_frame(&frame)
}

/// Runs commit and reveal in-process, with every message passing through
/// the frame codec.
pub fn run_commitment_session(params: ProtocolParams, b: bool, seed: u64) -> Result<SessionResult> {
    let root = SimRng::from_seed(seed);
    let mut receiver = Receiver::new(params, root.fork(0));
    let mut committer = Committer::new(b, root.fork(1));
    let mut bytes = 0;
    let challenge = relay(&receiver.challenge(), &mut bytes)?;
    let commitment = relay(&committer.respond(&challenge)?, &mut bytes)?;
    receiver.receive_commitment(&commitment)?;
    let opening = relay(&committer.open()?, &mut bytes)?;
    let outcome = receiver.receive_opening(&opening)?;
    finish(receiver, &opening, outcome, bytes)
}

fn finish(receiver: Receiver, opening: &Message, outcome: RevealOutcome, bytes: usize) -> Result<SessionResult> {
    let transcript = receiver.transcript.ok_or_else(|| Error::domain("session ended without a commitment"))?;
    let Payload::Opening(opening) = &opening.payload else {
        return Err(unexpected("an opening", opening));
    };
    Ok(SessionResult {
        outcome,
        opening: opening.clone(),
        transcript_digest: digest_hex(&transcript),
        transcript,
        bytes_exchanged: bytes,
    })
}

/// Same session as [`run_commitment_session`], with the committer on a
/// separate thread connected over a loopback TCP socket.
pub fn run_commitment_over_tcp(params: ProtocolParams, b: bool, seed: u64) -> Result<SessionResult> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let root = SimRng::from_seed(seed);
    let committer_rng = root.fork(1);
    let handle = std::thread::spawn(move || -> Result<()> {
        let mut stream = TcpStream::connect(addr)?;
        let mut committer = Committer::new(b, committer_rng);
        let challenge = read_message(&mut stream)?;
        write_message(&mut stream, &committer.respond(&challenge)?)?;
        write_message(&mut stream, &committer.open()?)?;
        Ok(())
    });
    let (mut stream, _) = listener.accept()?;
    let mut receiver = Receiver::new(params, root.fork(0));
    let challenge = receiver.challenge();
    let mut bytes = encode_frame(&challenge)?.len();
    write_message(&mut stream, &challenge)?;
    let commitment = read_message(&mut stream)?;
    bytes += encode_frame(&commitment)?.len();
    receiver.receive_commitment(&commitment)?;
    let opening = read_message(&mut stream)?;
    bytes += encode_frame(&opening)?.len();
    let outcome = receiver.receive_opening(&opening)?;
    handle
        .join()
        .map_err(|_| Error::Codec("committer thread panicked".into()))??;
    finish(receiver, &opening, outcome, bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prf::{PrfKey, PrfVariant};
    use crate::tomography::TomographyMode;

    fn params(mode: TomographyMode) -> ProtocolParams {
        ProtocolParams::commitment_desk(8, 1, 3, mode, PrfVariant::Mixer { seed: 3 }).unwrap()
    }

    #[test]
    fn frames_round_trip_byte_identically() {
        let msg = Message::new(
            Role::Committer,
            Payload::Opening(Opening {
                key: PrfKey::from_index(8, 200),
                b: 1,
            }),
        );
        let frame = encode_frame(&msg).unwrap();
        assert_eq!(u32::from_be_bytes(frame[..4].try_into().unwrap()) as usize, frame.len() - 4);
        let back = decode_frame(&frame).unwrap();
        assert_eq!(back, msg);
        assert_eq!(encode_frame(&back).unwrap(), frame);
        assert!(decode_frame(&frame[..frame.len() - 1]).is_err());
        let mut long = frame.clone();
        long.push(0);
        assert!(decode_frame(&long).is_err());
    }

    #[test]
    fn version_and_size_are_checked() {
        let mut msg = Message::new(Role::Receiver, Payload::Opening(Opening { key: PrfKey::from_index(2, 0), b: 0 }));
        msg.version = 9;
        assert!(decode_frame(&encode_frame(&msg).unwrap()).is_err());
        let huge = (MAX_FRAME_BYTES + 1).to_be_bytes();
        assert!(decode_frame(&huge).is_err());
    }

    #[test]
    fn transcript_serialization_is_lossless() {
        let r = run_commitment_session(params(TomographyMode::Sampled), true, 8).unwrap();
        assert_eq!(r.outcome, RevealOutcome::Bit(true));
        let text = serde_json::to_vec(&r.transcript).unwrap();
        let back: CommitmentTranscript = serde_json::from_slice(&text).unwrap();
        assert_eq!(back, r.transcript);
        assert_eq!(serde_json::to_vec(&back).unwrap(), text);
        assert_eq!(digest_hex(&back), r.transcript_digest);
    }

    #[test]
    fn sessions_are_deterministic_and_transport_independent() {
        let p = params(TomographyMode::Sampled);
        let a = run_commitment_session(p, false, 11).unwrap();
        let b = run_commitment_session(p, false, 11).unwrap();
        assert_eq!(a.transcript_digest, b.transcript_digest);
        let tcp = run_commitment_over_tcp(p, false, 11).unwrap();
        assert_eq!(tcp.transcript_digest, a.transcript_digest);
        assert_eq!(tcp.outcome, RevealOutcome::Bit(false));
        assert_eq!(tcp.bytes_exchanged, a.bytes_exchanged);
    }

    #[test]
    fn out_of_order_messages_are_refused() {
        let p = params(TomographyMode::Analytic);
        let mut receiver = Receiver::new(p, SimRng::from_seed(1));
        let committer = Committer::new(true, SimRng::from_seed(2));
        assert!(committer.open().is_err());
        let bogus = Message::new(Role::Committer, Payload::Commitment { tomographs: vec![] });
        assert!(receiver.receive_commitment(&bogus).is_err());
        let _ = receiver.challenge();
        receiver.receive_commitment(&bogus).unwrap();
        let opening = Message::new(Role::Committer, Payload::Opening(Opening { key: PrfKey::from_index(8, 0), b: 0 }));
        assert_eq!(receiver.receive_opening(&opening).unwrap(), RevealOutcome::Bottom);
    }
}
