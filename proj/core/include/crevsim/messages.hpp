#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crevsim/crypto.hpp"
#include "crevsim/ids.hpp"
#include "crevsim/lists.hpp"

namespace crevsim {

// Car-to-car envelope: payload plus sender credentials, sealed to the
// recipient's public key. Mock cipher: the envelope records the recipient
// key and refuses mismatched opens.
struct C2CEnvelope {
    PublicKeyId recipient_pk;
    std::string payload;
    PublicKeyId sender_pk;
    Signature sender_sig;
    Certificate sender_cert;
    ClusterSignature group_sig;

    auto operator<=>(const C2CEnvelope&) const = default;
};

C2CEnvelope seal_c2c(const std::string& payload, const KeyPair& sender_keys,
                     const Certificate& sender_cert,
                     const ClusterSignature& group_sig,
                     const PublicKeyId& recipient_pk);

// nullopt on key mismatch (DecryptionFailure).
std::optional<C2CEnvelope> open_c2c(const C2CEnvelope& env,
                                    const PrivateKeyId& recipient_sk);

// --- Wire messages -------------------------------------------------------

struct VehicleHello {
    Certificate cert;
    PublicKeyId pk;
};
struct AddRequest {
    CertificateId cert;
    RsuId reporter{0};
};
struct RemoveRequest {
    CertificateId cert;
    RsuId reporter{0};
};
struct LcclBroadcast {
    Lccl lccl;
    std::uint64_t epoch{0};
};
struct SignatureRotation {
    ClusterId cluster{0};
    std::uint64_t new_epoch{0};
};
struct PkRequest {
    CertificateId target;
};
struct PkResponse {
    CertificateId target;
    std::optional<PublicKeyId> pk;  // nullopt = PkUnknown
};
struct C2CMessage {
    C2CEnvelope envelope;
};
struct SafetyReport {
    std::string body;
};
struct LocalClusterNews {
    std::vector<std::string> news;
    Lccl lccl;
    ClusterSignature group_sig;
    PublicKeyId rsu_pk;
};
struct GreyAreaRequest {
    Certificate cert;
    PublicKeyId pk;
};
struct GreyAreaGrant {
    ClusterSignature group_sig;
    Lccl lccl;
};

using ProtocolMessage =
    std::variant<VehicleHello, AddRequest, RemoveRequest, LcclBroadcast,
                 SignatureRotation, PkRequest, PkResponse, C2CMessage,
                 SafetyReport, LocalClusterNews, GreyAreaRequest, GreyAreaGrant>;

std::string message_kind(const ProtocolMessage& msg);

// Canonical self-describing text form, fixed field order, list entries
// front-to-back. Used in traces and golden files.
std::string to_text(const ProtocolMessage& msg);
std::string to_text(const C2CEnvelope& env);
std::string to_text(const ClusterSignature& sig);

// Byte sizes are configured, not derived from the text encoding. Messages
// that carry an LCCL add the list's serialized size to their fixed base.
struct MessageSizing {
    std::map<std::string, std::size_t> fixed_bytes;  // keyed by message_kind
    std::size_t entry_size_bytes{100};
    std::size_t header_bytes{16};

    static MessageSizing defaults();
};

std::size_t message_size_bytes(const ProtocolMessage& msg,
                               const MessageSizing& sizing);

}  // namespace crevsim
