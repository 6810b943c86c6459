// SPDX-License-Identifier: Apache-2.0

use rand::RngCore;

use crate::bits::BitString;
use crate::error::Result;
use crate::reactive::{Diagnostics, GameShape, ReactiveScheme, StreamingDecoder};

/// Pads a scheme's output with a public uniform `X′`. Every document gains
/// `ℓ′` trailing bits; those of document 1 are `X′`, and the inner scheme
/// carries `x ⊕ X′`. `Dec` returns `X′ ⊕ Dec_inner`, so decoding a uniform
/// transcript gives a uniform message and a detector may target any fixed
/// `x`.
#[derive(Clone, Debug)]
pub struct NormalizedScheme<S> {
    inner: S,
}

pub struct NormalizedState<T> {
    x: BitString,
    shape: GameShape,
    pad: Option<BitString>,
    inner: Option<T>,
}

impl<S: ReactiveScheme> NormalizedScheme<S> {
    pub fn new(inner: S) -> Self {
        NormalizedScheme { inner }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    fn strip(&self, t: &[BitString]) -> Vec<BitString> {
        t.iter()
            .map(|doc| doc.slice(0..self.inner.doc_bits()))
            .collect()
    }

    fn pad_of(&self, doc: &BitString) -> BitString {
        doc.slice(self.inner.doc_bits()..self.doc_bits())
    }

    fn ensure_inner(
        &self,
        prefix: &[BitString],
        state: &mut NormalizedState<S::State>,
        rng: &mut dyn RngCore,
    ) -> Result<()> {
        if state.inner.is_some() {
            return Ok(());
        }
        let pad = match prefix.first() {
            Some(doc) => self.pad_of(doc),
            None => BitString::random(self.msg_bits(), rng),
        };
        state.inner = Some(self.inner.init(&state.x.xor(&pad), &state.shape, rng)?);
        state.pad = Some(pad);
        Ok(())
    }
}

impl<S: ReactiveScheme> ReactiveScheme for NormalizedScheme<S> {
    type State = NormalizedState<S::State>;

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn doc_bits(&self) -> usize {
        self.inner.doc_bits() + self.inner.msg_bits()
    }

    fn msg_bits(&self) -> usize {
        self.inner.msg_bits()
    }

    fn key_bits(&self) -> usize {
        self.inner.key_bits()
    }

    fn validate(&self, shape: &GameShape) -> Result<()> {
        self.inner.validate(shape)
    }

    fn init(
        &self,
        x: &BitString,
        shape: &GameShape,
        _rng: &mut dyn RngCore,
    ) -> Result<Self::State> {
        self.inner.validate(shape)?;
        Ok(NormalizedState {
            x: x.clone(),
            shape: *shape,
            pad: None,
            inner: None,
        })
    }

    fn encode(
        &self,
        prefix: &[BitString],
        state: &mut Self::State,
        rng: &mut dyn RngCore,
    ) -> BitString {
        // `validate` ran in `init`, so the inner `init` accepts this shape.
        self.ensure_inner(prefix, state, rng)
            .expect("inner scheme accepted the game shape");
        let stripped = self.strip(prefix);
        let inner_state = state.inner.as_mut().expect("initialized above");
        let doc = self.inner.encode(&stripped, inner_state, rng);
        let tail = if prefix.is_empty() {
            state.pad.clone().expect("initialized above")
        } else {
            BitString::random(self.msg_bits(), rng)
        };
        doc.concat(&tail)
    }

    fn extract_key(
        &self,
        t: &[BitString],
        state: &Self::State,
        rng: &mut dyn RngCore,
    ) -> Result<BitString> {
        let stripped = self.strip(t);
        match &state.inner {
            Some(inner) => self.inner.extract_key(&stripped, inner, rng),
            None => {
                let mut fresh = NormalizedState {
                    x: state.x.clone(),
                    shape: state.shape,
                    pad: None,
                    inner: None,
                };
                self.ensure_inner(t, &mut fresh, rng)?;
                self.inner.extract_key(
                    &stripped,
                    fresh.inner.as_ref().expect("initialized above"),
                    rng,
                )
            }
        }
    }

    fn decode(&self, dk: &BitString, t: &[BitString]) -> BitString {
        let Some(first) = t.first() else {
            return BitString::zeros(self.msg_bits());
        };
        self.pad_of(first)
            .xor(&self.inner.decode(dk, &self.strip(t)))
    }

    fn diagnostics(&self, state: &Self::State) -> Diagnostics {
        state
            .inner
            .as_ref()
            .map(|s| self.inner.diagnostics(s))
            .unwrap_or_default()
    }
}

impl<S: ReactiveScheme + StreamingDecoder> StreamingDecoder for NormalizedScheme<S> {
    type Summary = (Option<BitString>, S::Summary);

    fn start(&self) -> Self::Summary {
        (None, self.inner.start())
    }

    fn absorb(&self, summary: &Self::Summary, round: usize, doc: &BitString) -> Self::Summary {
        let pad = summary.0.clone().or_else(|| Some(self.pad_of(doc)));
        let inner_doc = doc.slice(0..self.inner.doc_bits());
        (pad, self.inner.absorb(&summary.1, round, &inner_doc))
    }

    fn finish(&self, summary: &Self::Summary, dk: &BitString) -> BitString {
        let inner = self.inner.finish(&summary.1, dk);
        match &summary.0 {
            Some(pad) => pad.xor(&inner),
            None => BitString::zeros(self.msg_bits()),
        }
    }
}
