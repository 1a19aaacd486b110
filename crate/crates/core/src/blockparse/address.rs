use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::error::AddressError;
use super::hash::double_sha256;

const ALPHABET: &[u8; 58] = b"123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

/// Mainnet pay-to-public-key-hash version byte.
pub const P2PKH_VERSION: u8 = 0x00;

/// A pay-to-public-key-hash destination: the 20-byte RIPEMD-160(SHA-256(pubkey))
/// payload. Renders as Base58Check with version byte 0x00.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Address {
    pub hash160: [u8; 20],
}

impl Address {
    pub fn from_hash160(hash160: [u8; 20]) -> Self {
        Address { hash160 }
    }

    /// Base58Check encoding of `0x00 || hash160 || checksum`.
    pub fn encoded(&self) -> String {
        let mut payload = Vec::with_capacity(25);
        payload.push(P2PKH_VERSION);
        payload.extend_from_slice(&self.hash160);
        let checksum = double_sha256(&payload);
        payload.extend_from_slice(&checksum[..4]);
        base58_encode(&payload)
    }

    pub fn from_encoded(s: &str) -> Result<Self, AddressError> {
        let raw = base58_decode(s)?;
        if raw.len() != 25 {
            return Err(AddressError::BadLength(raw.len()));
        }
        let checksum = double_sha256(&raw[..21]);
        if checksum[..4] != raw[21..] {
            return Err(AddressError::BadChecksum);
        }
        if raw[0] != P2PKH_VERSION {
            return Err(AddressError::BadVersion(raw[0]));
        }
        let mut hash160 = [0u8; 20];
        hash160.copy_from_slice(&raw[1..21]);
        Ok(Address { hash160 })
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoded())
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({})", self.encoded())
    }
}

impl FromStr for Address {
    type Err = AddressError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Address::from_encoded(s)
    }
}

/// Returns the destination of a standard P2PKH output script
/// (`OP_DUP OP_HASH160 <20 bytes> OP_EQUALVERIFY OP_CHECKSIG`), or `None`
/// for every other script.
pub fn extract_p2pkh_address(script_pubkey: &[u8]) -> Option<Address> {
    match script_pubkey {
        [0x76, 0xA9, 0x14, hash @ .., 0x88, 0xAC] if hash.len() == 20 => {
            let mut hash160 = [0u8; 20];
            hash160.copy_from_slice(hash);
            Some(Address { hash160 })
        }
        _ => None,
    }
}

/// The P2PKH locking script paying to `address`.
pub fn p2pkh_script(address: &Address) -> Vec<u8> {
    let mut s = Vec::with_capacity(25);
    s.extend_from_slice(&[0x76, 0xA9, 0x14]);
    s.extend_from_slice(&address.hash160);
    s.extend_from_slice(&[0x88, 0xAC]);
    s
}

fn base58_encode(input: &[u8]) -> String {
    let zeros = input.iter().take_while(|&&b| b == 0).count();
    // Little-endian base-58 digits.
    let mut digits: Vec<u8> = Vec::with_capacity(input.len() * 138 / 100 + 1);
    for &byte in &input[zeros..] {
        let mut carry = byte as u32;
        for d in digits.iter_mut() {
            carry += (*d as u32) << 8;
            *d = (carry % 58) as u8;
            carry /= 58;
        }
        while carry > 0 {
            digits.push((carry % 58) as u8);
            carry /= 58;
        }
    }
    let mut out = String::with_capacity(zeros + digits.len());
    out.extend(std::iter::repeat_n('1', zeros));
    out.extend(digits.iter().rev().map(|&d| ALPHABET[d as usize] as char));
    out
}

fn base58_decode(input: &str) -> Result<Vec<u8>, AddressError> {
    let zeros = input.chars().take_while(|&c| c == '1').count();
    let mut bytes: Vec<u8> = Vec::with_capacity(input.len());
    for c in input.chars().skip(zeros) {
        let value = ALPHABET
            .iter()
            .position(|&a| a as char == c)
            .ok_or(AddressError::InvalidCharacter(c))? as u32;
        let mut carry = value;
        for b in bytes.iter_mut() {
            carry += (*b as u32) * 58;
            *b = (carry & 0xFF) as u8;
            carry >>= 8;
        }
        while carry > 0 {
            bytes.push((carry & 0xFF) as u8);
            carry >>= 8;
        }
    }
    let mut out = vec![0u8; zeros];
    out.extend(bytes.iter().rev());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zero_script() -> Vec<u8> {
        let mut s = vec![0x76, 0xA9, 0x14];
        s.extend_from_slice(&[0u8; 20]);
        s.extend_from_slice(&[0x88, 0xAC]);
        s
    }

    #[test]
    fn zero_payload_address() {
        let addr = extract_p2pkh_address(&zero_script()).unwrap();
        // Independent Base58Check implementation.
        let oracle = bs58::encode([0u8; 20])
            .with_check_version(0x00)
            .into_string();
        assert_eq!(oracle, "1111111111111111111114oLvT2");
        assert_eq!(addr.encoded(), oracle);
    }

    #[test]
    fn non_p2pkh_scripts_are_absent() {
        assert_eq!(extract_p2pkh_address(&[]), None);
        assert_eq!(extract_p2pkh_address(&[0x6A, 0x04, 1, 2, 3, 4]), None);
        let mut long = zero_script();
        long.push(0x00);
        assert_eq!(extract_p2pkh_address(&long), None);
        let mut wrong_push = zero_script();
        wrong_push[2] = 0x15;
        assert_eq!(extract_p2pkh_address(&wrong_push), None);
    }

    #[test]
    fn known_mainnet_address() {
        // Address of the public key in the genesis coinbase output.
        let a: Address = "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa".parse().unwrap();
        assert_eq!(a.hash160[0], 0x62);
        assert_eq!(a.encoded(), "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa");
    }

    #[test]
    fn rejects_corrupted_strings() {
        let mut s = Address::from_hash160([7; 20]).encoded();
        let last = s.pop().unwrap();
        s.push(if last == 'a' { 'b' } else { 'a' });
        assert_eq!(Address::from_encoded(&s), Err(AddressError::BadChecksum));
        assert_eq!(
            Address::from_encoded("1111I"),
            Err(AddressError::InvalidCharacter('I'))
        );
        assert!(matches!(
            Address::from_encoded("1111"),
            Err(AddressError::BadLength(4))
        ));
    }

    proptest! {
        #[test]
        fn encoding_round_trips_and_matches_oracle(h in any::<[u8; 20]>()) {
            let a = Address::from_hash160(h);
            let s = a.encoded();
            let oracle = bs58::encode(h).with_check_version(0x00).into_string();
            prop_assert_eq!(&s, &oracle);
            prop_assert_eq!(Address::from_encoded(&s).unwrap(), a);
            prop_assert_eq!(extract_p2pkh_address(&p2pkh_script(&a)), Some(a));
        }
    }
}
