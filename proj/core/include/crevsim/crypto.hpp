#pragma once

#include <cstdint>
#include <string>

#include "crevsim/ids.hpp"

namespace crevsim {

// Deterministic mock crypto. A key pair is two tagged views of one owner
// token; sign/verify and seal/open succeed iff the tokens match. No real
// cryptography happens anywhere in the simulator.

struct KeyPair {
    PublicKeyId pk;
    PrivateKeyId sk;

    static KeyPair derive(const std::string& owner) {
        return {PublicKeyId{"pk/" + owner}, PrivateKeyId{"sk/" + owner}};
    }
};

inline std::string key_owner(const PublicKeyId& pk) {
    return pk.value.rfind("pk/", 0) == 0 ? pk.value.substr(3) : pk.value;
}
inline std::string key_owner(const PrivateKeyId& sk) {
    return sk.value.rfind("sk/", 0) == 0 ? sk.value.substr(3) : sk.value;
}

inline bool keys_match(const PrivateKeyId& sk, const PublicKeyId& pk) {
    return key_owner(sk) == key_owner(pk);
}

struct Certificate {
    CertificateId id;
    PublicKeyId holder_pk;
    std::string issuer;

    auto operator<=>(const Certificate&) const = default;
};

struct Signature {
    std::string signer;   // owner token of the signing key
    std::string message;  // signed content (mock: carried verbatim)

    auto operator<=>(const Signature&) const = default;
};

inline Signature sign(const std::string& message, const PrivateKeyId& sk) {
    return {key_owner(sk), message};
}

inline bool verify(const Signature& sig, const std::string& message,
                   const PublicKeyId& pk) {
    return sig.signer == key_owner(pk) && sig.message == message;
}

// Per-cluster group credential. Verifies only against the cluster's
// current epoch; rotated whenever an adversary leaves the cluster.
struct ClusterSignature {
    ClusterId cluster{0};
    std::uint64_t epoch{0};

    auto operator<=>(const ClusterSignature&) const = default;
};

inline ClusterSignature rotate_signature(const ClusterSignature& current) {
    return {current.cluster, current.epoch + 1};
}

}  // namespace crevsim
