use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The four open-class parts of speech a synset can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pos {
    #[serde(rename = "n")]
    Noun,
    #[serde(rename = "v")]
    Verb,
    #[serde(rename = "a")]
    Adjective,
    #[serde(rename = "r")]
    Adverb,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    /// Single-letter wordnet code.
    pub fn code(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adjective => 'a',
            Pos::Adverb => 'r',
        }
    }

    pub fn from_code(c: char) -> Option<Pos> {
        match c {
            'n' => Some(Pos::Noun),
            'v' => Some(Pos::Verb),
            // satellite adjectives fold into adjectives
            'a' | 's' => Some(Pos::Adjective),
            'r' => Some(Pos::Adverb),
            _ => None,
        }
    }

    /// Maps a corpus tag onto the four categories. Tags outside them yield `None`.
    ///
    /// Accepts the wordnet letters, Universal Dependencies names and the
    /// common long forms, case-insensitively.
    pub fn from_tag(tag: &str) -> Option<Pos> {
        match tag.to_ascii_lowercase().as_str() {
            "n" | "noun" | "propn" => Some(Pos::Noun),
            "v" | "verb" => Some(Pos::Verb),
            "a" | "adj" | "adjective" => Some(Pos::Adjective),
            "r" | "adv" | "adverb" => Some(Pos::Adverb),
            _ => None,
        }
    }

    /// Recovers the part of speech from a synset id of the form `<offset>-<code>`.
    pub fn from_synset_id(id: &str) -> Option<Pos> {
        let (_, suffix) = id.rsplit_once('-')?;
        let mut chars = suffix.chars();
        let c = chars.next()?;
        if chars.next().is_some() {
            return None;
        }
        Pos::from_code(c)
    }

    pub fn name(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adjective => "adjective",
            Pos::Adverb => "adverb",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::from_tag(s).ok_or_else(|| format!("unknown part of speech `{s}`"))
    }
}
