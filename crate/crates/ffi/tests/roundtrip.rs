// SPDX-License-Identifier: Apache-2.0

use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use anonsteg_ffi::*;

fn last_error() -> String {
    let p = as_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Fixture {
    rng: *mut AsRng,
    params: *mut AsParams,
    ek: *mut AsEncodingKey,
}

impl Fixture {
    fn new(doc_bits: usize, docs: usize) -> Self {
        let mut rng = ptr::null_mut();
        let mut params = ptr::null_mut();
        let mut ek = ptr::null_mut();
        unsafe {
            assert_eq!(as_rng_new(7, &mut rng), AsStatus::Ok);
            assert_eq!(
                as_params_new(
                    128,
                    doc_bits,
                    docs,
                    AS_HE_TRANSPARENT,
                    AS_VC_MERKLE,
                    &mut params
                ),
                AsStatus::Ok
            );
            assert_eq!(as_gen(params, rng, &mut ek), AsStatus::Ok);
        }
        Fixture { rng, params, ek }
    }
}

impl Drop for Fixture {
    fn drop(&mut self) {
        unsafe {
            as_encoding_key_free(self.ek);
            as_params_free(self.params);
            as_rng_free(self.rng);
        }
    }
}

fn encode(f: &Fixture, message: &[u8]) -> Vec<u8> {
    let mut len = 0;
    unsafe {
        assert_eq!(
            as_enc(
                f.params,
                f.ek,
                message.as_ptr(),
                message.len(),
                ptr::null_mut(),
                0,
                &mut len
            ),
            AsStatus::BufferTooSmall
        );
        let mut buf = vec![0u8; len];
        assert_eq!(
            as_enc(
                f.params,
                f.ek,
                message.as_ptr(),
                message.len(),
                buf.as_mut_ptr(),
                buf.len(),
                &mut len
            ),
            AsStatus::Ok
        );
        buf
    }
}

#[test]
fn encode_extract_decode_roundtrip() {
    let f = Fixture::new(16, 4);
    let message = [0xBE, 0xEF];
    let rows: Vec<u8> = [[1u8, 2], [3, 4], [5, 6], [7, 8]].concat();
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(
            as_transcript_new(128, 16, 4, rows.as_ptr(), rows.len(), &mut t),
            AsStatus::Ok
        );
        let doc = encode(&f, &message);
        assert_eq!(
            as_transcript_set_document(t, 3, doc.as_ptr(), doc.len()),
            AsStatus::Ok
        );

        let mut dk = ptr::null_mut();
        assert_eq!(
            as_key_extract(f.params, f.ek, t, 3, f.rng, &mut dk),
            AsStatus::Ok
        );

        let mut out = [0u8; 2];
        let mut len = 0;
        assert_eq!(
            as_dec(dk, t, out.as_mut_ptr(), out.len(), &mut len),
            AsStatus::Ok
        );
        assert_eq!((len, out), (2, message));

        // Serialize both objects and decode from the parsed copies.
        let mut need = 0;
        assert_eq!(
            as_decoding_key_to_bytes(dk, ptr::null_mut(), 0, &mut need),
            AsStatus::BufferTooSmall
        );
        let mut dk_bytes = vec![0u8; need];
        assert_eq!(
            as_decoding_key_to_bytes(dk, dk_bytes.as_mut_ptr(), need, &mut need),
            AsStatus::Ok
        );
        assert_eq!(
            as_transcript_to_bytes(t, ptr::null_mut(), 0, &mut need),
            AsStatus::BufferTooSmall
        );
        let mut t_bytes = vec![0u8; need];
        assert_eq!(
            as_transcript_to_bytes(t, t_bytes.as_mut_ptr(), need, &mut need),
            AsStatus::Ok
        );

        let mut dk2 = ptr::null_mut();
        let mut t2 = ptr::null_mut();
        assert_eq!(
            as_decoding_key_from_bytes(dk_bytes.as_ptr(), dk_bytes.len(), &mut dk2),
            AsStatus::Ok
        );
        assert_eq!(
            as_transcript_from_bytes(t_bytes.as_ptr(), t_bytes.len(), &mut t2),
            AsStatus::Ok
        );
        let mut out2 = [0u8; 2];
        assert_eq!(
            as_dec(dk2, t2, out2.as_mut_ptr(), 2, &mut len),
            AsStatus::Ok
        );
        assert_eq!(out2, message);

        as_decoding_key_free(dk2);
        as_transcript_free(t2);
        as_decoding_key_free(dk);
        as_transcript_free(t);
    }
}

#[test]
fn null_handles_are_reported() {
    let mut ek = ptr::null_mut();
    let mut len = 0;
    unsafe {
        assert_eq!(
            as_gen(ptr::null(), ptr::null_mut(), &mut ek),
            AsStatus::NullPointer
        );
        assert!(last_error().contains("params"));
        assert!(ek.is_null());
        assert_eq!(
            as_dec(ptr::null(), ptr::null(), ptr::null_mut(), 0, &mut len),
            AsStatus::NullPointer
        );
        assert_eq!(as_rng_new(0, ptr::null_mut()), AsStatus::NullPointer);
        // Freeing null is a no-op.
        as_rng_free(ptr::null_mut());
        as_transcript_free(ptr::null_mut());
    }
}

#[test]
fn invalid_arguments_and_malformed_bytes() {
    let mut params = ptr::null_mut();
    let mut t = ptr::null_mut();
    let mut dk = ptr::null_mut();
    unsafe {
        assert_eq!(
            as_params_new(128, 8, 4, 9, AS_VC_MERKLE, &mut params),
            AsStatus::InvalidArgument
        );
        assert!(last_error().contains("HE selector"));
        assert_eq!(
            as_params_new(12, 8, 4, AS_HE_TRANSPARENT, AS_VC_MERKLE, &mut params),
            AsStatus::InvalidArgument
        );
        let rows = [0u8; 3];
        assert_eq!(
            as_transcript_new(128, 8, 4, rows.as_ptr(), 3, &mut t),
            AsStatus::InvalidArgument
        );
        let junk = [0xFFu8; 11];
        assert_eq!(
            as_transcript_from_bytes(junk.as_ptr(), junk.len(), &mut t),
            AsStatus::Decode
        );
        assert_eq!(
            as_decoding_key_from_bytes(junk.as_ptr(), junk.len(), &mut dk),
            AsStatus::Decode
        );
        assert!(!last_error().is_empty());
    }
}

#[test]
fn tampered_transcript_decodes_to_bottom_or_other_message() {
    let f = Fixture::new(8, 2);
    unsafe {
        let rows = [0u8, 0];
        let mut t = ptr::null_mut();
        assert_eq!(
            as_transcript_new(128, 8, 2, rows.as_ptr(), 2, &mut t),
            AsStatus::Ok
        );
        let doc = encode(&f, &[0x5A]);
        assert_eq!(
            as_transcript_set_document(t, 1, doc.as_ptr(), 1),
            AsStatus::Ok
        );
        let mut dk = ptr::null_mut();
        assert_eq!(
            as_key_extract(f.params, f.ek, t, 1, f.rng, &mut dk),
            AsStatus::Ok
        );
        assert_eq!(
            as_transcript_set_document(t, 1, [doc[0] ^ 1].as_ptr(), 1),
            AsStatus::Ok
        );
        let mut out = [0u8; 1];
        let mut len = 0;
        let status = as_dec(dk, t, out.as_mut_ptr(), 1, &mut len);
        assert!(status == AsStatus::Bottom || (status == AsStatus::Ok && out != [0x5A]));
        assert_eq!(
            as_transcript_set_document(t, 3, doc.as_ptr(), 1),
            AsStatus::InvalidArgument
        );
        as_decoding_key_free(dk);
        as_transcript_free(t);
    }
}

#[test]
fn status_strings_cover_all_codes() {
    for code in 0..=9 {
        let s = unsafe { CStr::from_ptr(as_status_string(code)) };
        assert!(!s.to_bytes().is_empty());
    }
    let v = unsafe { CStr::from_ptr(as_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/anonsteg.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "as_gen",
        "as_key_extract",
        "as_dec",
        "as_last_error_message",
        "AS_STATUS_BOTTOM",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}
