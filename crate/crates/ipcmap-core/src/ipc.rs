//! IPC classification symbols: parsing, canonical formatting, and
//! hierarchical truncation.
//!
//! A symbol is made of a section letter (`A`-`H`), a two-digit class, a
//! subclass letter, and a group written `major/minor` (`13/55`). A minor of
//! all zeros (`13/00`) marks a main group. Codes may stop at any level:
//! `"A"`, `"A63"`, `"A63F"` and `"A63F 13/55"` are all valid.
//!
//! Subgroup minors are positional numerals, so `13/5` and `13/50` are
//! different codes and the digits are kept exactly as written (only case and
//! spacing are normalized). Dot-depth within subgroups is not modeled; it is
//! not derivable from the symbol text.

use alloc::borrow::ToOwned;
use alloc::string::String;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::str::FromStr;

/// Granularity of an IPC symbol. `Group` covers main groups and subgroups
/// alike; they are distinct codes at the same depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IpcLevel {
    Section,
    Class,
    Subclass,
    Group,
}

impl IpcLevel {
    pub const ALL: [IpcLevel; 4] = [
        IpcLevel::Section,
        IpcLevel::Class,
        IpcLevel::Subclass,
        IpcLevel::Group,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IpcLevel::Section => "section",
            IpcLevel::Class => "class",
            IpcLevel::Subclass => "subclass",
            IpcLevel::Group => "group",
        }
    }
}

impl fmt::Display for IpcLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error from parsing or re-leveling an [`IpcCode`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IpcError {
    /// The input text is not a usable IPC symbol.
    Malformed { input: String, reason: &'static str },
    /// The code does not carry the fields needed for the requested level.
    LevelUnavailable {
        requested: IpcLevel,
        available: IpcLevel,
    },
}

impl fmt::Display for IpcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IpcError::Malformed { input, reason } => {
                write!(f, "malformed IPC code {input:?}: {reason}")
            }
            IpcError::LevelUnavailable {
                requested,
                available,
            } => write!(
                f,
                "code only reaches {available} level, {requested} requested"
            ),
        }
    }
}

impl core::error::Error for IpcError {}

/// Group portion of a code. The minor keeps its written width because
/// subgroup numerals are positional: `/5`, `/50` and `/05` are all distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct GroupPart {
    major: u16,
    minor_value: u32,
    minor_width: u8,
}

/// A parsed IPC symbol plus its canonical text (e.g. `"A63F 13/55"`).
///
/// Ordering, equality and hashing all go through the canonical text, which
/// is in 1:1 correspondence with the parsed fields. The canonical ordering
/// is what every deterministic export and tie-break in this crate uses.
#[derive(Clone, Debug)]
pub struct IpcCode {
    section: u8,
    class: Option<u8>,
    subclass: Option<u8>,
    group: Option<GroupPart>,
    text: String,
}

impl PartialEq for IpcCode {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for IpcCode {}

impl PartialOrd for IpcCode {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IpcCode {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.text.cmp(&other.text)
    }
}

impl Hash for IpcCode {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.text.hash(state);
    }
}

impl fmt::Display for IpcCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for IpcCode {
    type Err = IpcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IpcCode::parse(s)
    }
}

fn malformed(input: &str, reason: &'static str) -> IpcError {
    IpcError::Malformed {
        input: input.to_owned(),
        reason,
    }
}

impl IpcCode {
    /// Parse a symbol from text. Accepts spaced (`"A63F 13/55"`) and compact
    /// (`"A63F13/55"`) renderings at any level, normalizes case and spacing.
    pub fn parse(text: &str) -> Result<IpcCode, IpcError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(malformed(text, "empty input"));
        }

        let mut chars = trimmed.chars().map(|c| c.to_ascii_uppercase()).peekable();

        let section = match chars.next() {
            Some(c @ 'A'..='H') => c as u8,
            _ => return Err(malformed(trimmed, "section must be a letter A-H")),
        };

        if chars.peek().is_none() {
            return Ok(IpcCode::assemble(section, None, None, None));
        }

        let mut class = 0u8;
        for _ in 0..2 {
            match chars.next() {
                Some(c @ '0'..='9') => class = class * 10 + (c as u8 - b'0'),
                _ => return Err(malformed(trimmed, "class must be exactly two digits")),
            }
        }

        if chars.peek().is_none() {
            return Ok(IpcCode::assemble(section, Some(class), None, None));
        }

        let subclass = match chars.peek() {
            Some(c @ 'A'..='Z') => {
                let letter = *c as u8;
                chars.next();
                Some(letter)
            }
            _ => None,
        };

        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            return match subclass {
                Some(_) => Ok(IpcCode::assemble(section, Some(class), subclass, None)),
                None => Err(malformed(trimmed, "unexpected text after class")),
            };
        }
        if subclass.is_none() {
            return Err(malformed(trimmed, "group requires a subclass letter"));
        }

        let mut major: u32 = 0;
        let mut major_digits = 0usize;
        while let Some(c @ '0'..='9') = chars.peek().copied() {
            chars.next();
            major = major * 10 + (c as u32 - '0' as u32);
            major_digits += 1;
            if major > 9999 {
                return Err(malformed(trimmed, "main group out of range 1-9999"));
            }
        }
        if major_digits == 0 {
            return Err(malformed(trimmed, "group must start with digits"));
        }
        if major == 0 {
            return Err(malformed(trimmed, "main group out of range 1-9999"));
        }

        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        match chars.next() {
            Some('/') => {}
            _ => {
                return Err(malformed(
                    trimmed,
                    "group requires '/' between main group and subgroup",
                ))
            }
        }
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }

        let mut minor: u32 = 0;
        let mut minor_width = 0u8;
        while let Some(c @ '0'..='9') = chars.peek().copied() {
            chars.next();
            minor = minor * 10 + (c as u32 - '0' as u32);
            minor_width += 1;
            if minor_width > 6 {
                return Err(malformed(trimmed, "subgroup must be 1-6 digits"));
            }
        }
        if minor_width == 0 {
            return Err(malformed(trimmed, "subgroup digits missing after '/'"));
        }
        if chars.next().is_some() {
            return Err(malformed(trimmed, "unexpected trailing text"));
        }

        Ok(IpcCode::assemble(
            section,
            Some(class),
            subclass,
            Some(GroupPart {
                major: major as u16,
                minor_value: minor,
                minor_width,
            }),
        ))
    }

    fn assemble(
        section: u8,
        class: Option<u8>,
        subclass: Option<u8>,
        group: Option<GroupPart>,
    ) -> IpcCode {
        let mut text = String::new();
        text.push(section as char);
        if let Some(class) = class {
            text.push((b'0' + class / 10) as char);
            text.push((b'0' + class % 10) as char);
        }
        if let Some(subclass) = subclass {
            text.push(subclass as char);
        }
        if let Some(group) = group {
            text.push(' ');
            push_decimal(&mut text, group.major as u32, 0);
            text.push('/');
            push_decimal(&mut text, group.minor_value, group.minor_width);
        }
        IpcCode {
            section,
            class,
            subclass,
            group,
            text,
        }
    }

    /// Canonical text at the code's own level.
    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Deepest populated level.
    pub fn level(&self) -> IpcLevel {
        if self.group.is_some() {
            IpcLevel::Group
        } else if self.subclass.is_some() {
            IpcLevel::Subclass
        } else if self.class.is_some() {
            IpcLevel::Class
        } else {
            IpcLevel::Section
        }
    }

    pub fn section(&self) -> char {
        self.section as char
    }

    pub fn class(&self) -> Option<u8> {
        self.class
    }

    pub fn subclass(&self) -> Option<char> {
        self.subclass.map(|c| c as char)
    }

    pub fn group_major(&self) -> Option<u16> {
        self.group.map(|g| g.major)
    }

    pub fn group_minor(&self) -> Option<u32> {
        self.group.map(|g| g.minor_value)
    }

    /// True for codes whose subgroup digits are all zeros (`"... 13/00"`).
    pub fn is_main_group(&self) -> bool {
        matches!(self.group, Some(g) if g.minor_value == 0)
    }

    /// Canonical text truncated to `level`.
    ///
    /// Fails with [`IpcError::LevelUnavailable`] when the code is shallower
    /// than the requested level.
    pub fn format_at(&self, level: IpcLevel) -> Result<String, IpcError> {
        Ok(self.truncate_to(level)?.text)
    }

    /// Ancestor code at `level`. Truncation at the code's own level is the
    /// identity; main groups and subgroups are distinct nodes at `Group`.
    pub fn truncate_to(&self, level: IpcLevel) -> Result<IpcCode, IpcError> {
        if level > self.level() {
            return Err(IpcError::LevelUnavailable {
                requested: level,
                available: self.level(),
            });
        }
        Ok(match level {
            IpcLevel::Section => IpcCode::assemble(self.section, None, None, None),
            IpcLevel::Class => IpcCode::assemble(self.section, self.class, None, None),
            IpcLevel::Subclass => IpcCode::assemble(self.section, self.class, self.subclass, None),
            IpcLevel::Group => self.clone(),
        })
    }
}

/// Write `value` in decimal, zero-padded on the left to `min_width` digits.
fn push_decimal(out: &mut String, value: u32, min_width: u8) {
    let mut digits = [0u8; 10];
    let mut n = value;
    let mut len = 0;
    loop {
        digits[len] = b'0' + (n % 10) as u8;
        n /= 10;
        len += 1;
        if n == 0 {
            break;
        }
    }
    while len < min_width as usize {
        digits[len] = b'0';
        len += 1;
    }
    for i in (0..len).rev() {
        out.push(digits[i] as char);
    }
}
