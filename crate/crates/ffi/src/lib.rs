// SPDX-License-Identifier: Apache-2.0

//! C ABI over the anonsteg encoding scheme.
//!
//! Every object crosses the boundary as an opaque handle created by an
//! `as_*_new` or producing call and released with the matching `as_*_free`.
//! Every entry point returns an [`AsStatus`]; on failure a description is
//! available from [`as_last_error_message`] on the same thread. Bit strings are
//! passed packed most-significant-bit first, `ceil(bits / 8)` bytes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anonsteg::homomorphic::HeKind;
use anonsteg::scheme::{self, DecodingKey, EncodingKey, SchemeParams, Transcript};
use anonsteg::vc::VcKind;
use anonsteg::{BitString, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Result code of every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input bytes could not be parsed.
    Decode = 3,
    /// Decoding returned ⊥.
    Bottom = 4,
    /// The output buffer is too small; the required size was written.
    BufferTooSmall = 5,
    Budget = 6,
    Panic = 7,
    Internal = 8,
}

/// HE instantiation selector for [`as_params_new`].
pub const AS_HE_TRANSPARENT: u32 = 0;
pub const AS_HE_ONEHOT: u32 = 1;
/// Commitment instantiation selector for [`as_params_new`].
pub const AS_VC_MERKLE: u32 = 0;
pub const AS_VC_SSB: u32 = 1;

/// Seeded ChaCha20 generator.
pub struct AsRng(ChaCha20Rng);

pub struct AsParams(SchemeParams);

pub struct AsEncodingKey(EncodingKey);

pub struct AsTranscript {
    transcript: Transcript,
    security: u32,
}

pub struct AsDecodingKey(DecodingKey);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(AsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Decode(_) => AsStatus::Decode,
            Error::Budget { .. } => AsStatus::Budget,
            Error::Io(_) => AsStatus::Internal,
            _ => AsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(AsStatus::NullPointer, format!("{name} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(AsStatus::InvalidArgument, message.into())
}

/// Runs `body`, converting errors and panics into a status and the thread's
/// last error.
fn guard(body: impl FnOnce() -> Result<AsStatus, Failure>) -> AsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {message}"));
            AsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null(name))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: as for `borrow`, and the handle is not aliased for the call.
    unsafe { p.as_mut() }.ok_or_else(|| null(name))
}

unsafe fn input<'a>(p: *const u8, len: usize, name: &str) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    // SAFETY: the caller guarantees `len` readable bytes at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<AsStatus, Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: `out` is non-null and writable per the caller's contract.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(AsStatus::Ok)
}

/// Copies `bytes` to `buf` if it fits; always writes the size to `out_len`.
unsafe fn write_bytes(
    bytes: &[u8],
    buf: *mut u8,
    buf_len: usize,
    out_len: *mut usize,
) -> Result<AsStatus, Failure> {
    if out_len.is_null() {
        return Err(null("out_len"));
    }
    // SAFETY: `out_len` is non-null and writable.
    unsafe { *out_len = bytes.len() };
    if bytes.len() > buf_len || (buf.is_null() && !bytes.is_empty()) {
        return Err(Failure(
            AsStatus::BufferTooSmall,
            format!("buffer holds {buf_len} bytes, {} needed", bytes.len()),
        ));
    }
    if !bytes.is_empty() {
        // SAFETY: `buf` has room for `bytes.len()` bytes and does not overlap.
        unsafe { ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len()) };
    }
    Ok(AsStatus::Ok)
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        // SAFETY: `p` came from `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Static description of a status code; accepts any integer.
#[no_mangle]
pub extern "C" fn as_status_string(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer",
        2 => c"invalid argument",
        3 => c"malformed input",
        4 => c"decoding returned bottom",
        5 => c"buffer too small",
        6 => c"budget exceeded",
        7 => c"internal panic",
        8 => c"internal error",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn as_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn as_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn as_rng_new(seed: u64, out: *mut *mut AsRng) -> AsStatus {
    guard(|| unsafe { emit(out, AsRng(ChaCha20Rng::seed_from_u64(seed))) })
}

/// # Safety
/// `rng` must be null or a handle from [`as_rng_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn as_rng_free(rng: *mut AsRng) {
    unsafe { free(rng) }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn as_params_new(
    security: u32,
    doc_bits: usize,
    docs: usize,
    he: u32,
    vc: u32,
    out: *mut *mut AsParams,
) -> AsStatus {
    guard(|| {
        let he = match he {
            AS_HE_TRANSPARENT => HeKind::Transparent,
            AS_HE_ONEHOT => HeKind::OneHot,
            other => return Err(invalid(format!("unknown HE selector {other}"))),
        };
        let vc = match vc {
            AS_VC_MERKLE => VcKind::Merkle,
            AS_VC_SSB => VcKind::Ssb,
            other => return Err(invalid(format!("unknown VC selector {other}"))),
        };
        let params = SchemeParams::new(security, doc_bits, docs, he, vc)?;
        unsafe { emit(out, AsParams(params)) }
    })
}

/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn as_params_free(params: *mut AsParams) {
    unsafe { free(params) }
}

/// Samples an encoding key.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn as_gen(
    params: *const AsParams,
    rng: *mut AsRng,
    out: *mut *mut AsEncodingKey,
) -> AsStatus {
    guard(|| unsafe {
        let params = borrow(params, "params")?;
        let rng = borrow_mut(rng, "rng")?;
        let ek = scheme::gen(&params.0, &mut rng.0)?;
        emit(out, AsEncodingKey(ek))
    })
}

/// # Safety
/// `ek` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn as_encoding_key_free(ek: *mut AsEncodingKey) {
    unsafe { free(ek) }
}

/// Encodes a `doc_bits`-bit message into one document.
///
/// # Safety
/// `message` must hold `ceil(doc_bits / 8)` bytes; `buf` must hold `buf_len`
/// bytes; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn as_enc(
    params: *const AsParams,
    ek: *const AsEncodingKey,
    message: *const u8,
    message_len: usize,
    buf: *mut u8,
    buf_len: usize,
    out_len: *mut usize,
) -> AsStatus {
    guard(|| unsafe {
        let params = borrow(params, "params")?;
        let ek = borrow(ek, "ek")?;
        let bytes = input(message, message_len, "message")?;
        let x = BitString::from_bytes(bytes, params.0.msg_bits())?;
        let doc = scheme::enc(&ek.0, &x);
        write_bytes(&doc.to_bytes(), buf, buf_len, out_len)
    })
}

/// Builds a transcript from `docs` packed documents of `doc_bits` bits each,
/// laid out back to back.
///
/// # Safety
/// `rows` must hold `docs * ceil(doc_bits / 8)` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn as_transcript_new(
    security: u32,
    doc_bits: usize,
    docs: usize,
    rows: *const u8,
    rows_len: usize,
    out: *mut *mut AsTranscript,
) -> AsStatus {
    guard(|| unsafe {
        let width = doc_bits.div_ceil(8);
        if width == 0 || docs == 0 {
            return Err(invalid("document length and count must be positive"));
        }
        if docs.checked_mul(width) != Some(rows_len) {
            return Err(invalid(format!(
                "expected {} bytes of documents, got {rows_len}",
                docs * width
            )));
        }
        let bytes = input(rows, rows_len, "rows")?;
        let rows = bytes
            .chunks(width)
            .map(|c| BitString::from_bytes(c, doc_bits))
            .collect::<anonsteg::Result<Vec<_>>>()?;
        let transcript = Transcript::new(rows)?;
        emit(
            out,
            AsTranscript {
                transcript,
                security,
            },
        )
    })
}

/// Parses the binary transcript format.
///
/// # Safety
/// `bytes` must hold `len` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn as_transcript_from_bytes(
    bytes: *const u8,
    len: usize,
    out: *mut *mut AsTranscript,
) -> AsStatus {
    guard(|| unsafe {
        let (transcript, security) = Transcript::from_bytes(input(bytes, len, "bytes")?)?;
        emit(
            out,
            AsTranscript {
                transcript,
                security,
            },
        )
    })
}

/// # Safety
/// `t` must be live; `buf` must hold `buf_len` bytes; `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn as_transcript_to_bytes(
    t: *const AsTranscript,
    buf: *mut u8,
    buf_len: usize,
    out_len: *mut usize,
) -> AsStatus {
    guard(|| unsafe {
        let t = borrow(t, "transcript")?;
        write_bytes(&t.transcript.to_bytes(t.security), buf, buf_len, out_len)
    })
}

/// Replaces document `index` (1-based) with a packed document.
///
/// # Safety
/// `t` must be live; `doc` must hold `doc_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn as_transcript_set_document(
    t: *mut AsTranscript,
    index: usize,
    doc: *const u8,
    doc_len: usize,
) -> AsStatus {
    guard(|| unsafe {
        let t = borrow_mut(t, "transcript")?;
        if index == 0 || index > t.transcript.docs() {
            return Err(invalid(format!(
                "index {index} outside [1, {}]",
                t.transcript.docs()
            )));
        }
        let doc = BitString::from_bytes(input(doc, doc_len, "doc")?, t.transcript.doc_bits())?;
        t.transcript = t.transcript.with_document(index, doc)?;
        Ok(AsStatus::Ok)
    })
}

/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn as_transcript_free(t: *mut AsTranscript) {
    unsafe { free(t) }
}

/// Derives a decoding key for the sender of document `index` (1-based).
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn as_key_extract(
    params: *const AsParams,
    ek: *const AsEncodingKey,
    t: *const AsTranscript,
    index: usize,
    rng: *mut AsRng,
    out: *mut *mut AsDecodingKey,
) -> AsStatus {
    guard(|| unsafe {
        let params = borrow(params, "params")?;
        let ek = borrow(ek, "ek")?;
        let t = borrow(t, "transcript")?;
        let rng = borrow_mut(rng, "rng")?;
        let dk = scheme::key_extract(&params.0, &ek.0, &t.transcript, index, &mut rng.0)?;
        emit(out, AsDecodingKey(dk))
    })
}

/// # Safety
/// `bytes` must hold `len` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn as_decoding_key_from_bytes(
    bytes: *const u8,
    len: usize,
    out: *mut *mut AsDecodingKey,
) -> AsStatus {
    guard(|| unsafe {
        let dk = DecodingKey::from_bytes(input(bytes, len, "bytes")?)?;
        emit(out, AsDecodingKey(dk))
    })
}

/// # Safety
/// `dk` must be live; `buf` must hold `buf_len` bytes; `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn as_decoding_key_to_bytes(
    dk: *const AsDecodingKey,
    buf: *mut u8,
    buf_len: usize,
    out_len: *mut usize,
) -> AsStatus {
    guard(|| unsafe { write_bytes(&borrow(dk, "dk")?.0.to_bytes(), buf, buf_len, out_len) })
}

/// # Safety
/// `dk` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn as_decoding_key_free(dk: *mut AsDecodingKey) {
    unsafe { free(dk) }
}

/// Decodes the message. Returns [`AsStatus::Bottom`] when decoding yields ⊥.
///
/// # Safety
/// Handles must be live; `buf` must hold `buf_len` bytes; `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn as_dec(
    dk: *const AsDecodingKey,
    t: *const AsTranscript,
    buf: *mut u8,
    buf_len: usize,
    out_len: *mut usize,
) -> AsStatus {
    guard(|| unsafe {
        let dk = borrow(dk, "dk")?;
        let t = borrow(t, "transcript")?;
        match scheme::dec(&dk.0, &t.transcript) {
            Some(x) => write_bytes(&x.to_bytes(), buf, buf_len, out_len),
            None => Err(Failure(AsStatus::Bottom, "decoding returned bottom".into())),
        }
    })
}
