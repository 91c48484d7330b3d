#include "crevsim/messages.hpp"

#include <sstream>

namespace crevsim {

C2CEnvelope seal_c2c(const std::string& payload, const KeyPair& sender_keys,
                     const Certificate& sender_cert,
                     const ClusterSignature& group_sig,
                     const PublicKeyId& recipient_pk) {
    return C2CEnvelope{
        recipient_pk,
        payload,
        sender_keys.pk,
        sign(payload, sender_keys.sk),
        sender_cert,
        group_sig,
    };
}

std::optional<C2CEnvelope> open_c2c(const C2CEnvelope& env,
                                    const PrivateKeyId& recipient_sk) {
    if (!keys_match(recipient_sk, env.recipient_pk)) return std::nullopt;
    return env;
}

namespace {

struct KindVisitor {
    std::string operator()(const VehicleHello&) const { return "VehicleHello"; }
    std::string operator()(const AddRequest&) const { return "AddRequest"; }
    std::string operator()(const RemoveRequest&) const { return "RemoveRequest"; }
    std::string operator()(const LcclBroadcast&) const { return "LcclBroadcast"; }
    std::string operator()(const SignatureRotation&) const { return "SignatureRotation"; }
    std::string operator()(const PkRequest&) const { return "PkRequest"; }
    std::string operator()(const PkResponse&) const { return "PkResponse"; }
    std::string operator()(const C2CMessage&) const { return "C2C"; }
    std::string operator()(const SafetyReport&) const { return "SafetyReport"; }
    std::string operator()(const LocalClusterNews&) const { return "LocalClusterNews"; }
    std::string operator()(const GreyAreaRequest&) const { return "GreyAreaRequest"; }
    std::string operator()(const GreyAreaGrant&) const { return "GreyAreaGrant"; }
};

}  // namespace

std::string message_kind(const ProtocolMessage& msg) {
    return std::visit(KindVisitor{}, msg);
}

std::string to_text(const ClusterSignature& sig) {
    std::ostringstream os;
    os << "SignG{cluster=" << sig.cluster << ",epoch=" << sig.epoch << "}";
    return os.str();
}

std::string to_text(const C2CEnvelope& env) {
    std::ostringstream os;
    os << "C2CEnvelope{recipient=" << env.recipient_pk.value
       << ",payload=" << env.payload << ",sender_pk=" << env.sender_pk.value
       << ",sender_sig=" << env.sender_sig.signer
       << ",cert=" << env.sender_cert.id.value << "," << to_text(env.group_sig)
       << "}";
    return os.str();
}

namespace {

struct TextVisitor {
    std::string operator()(const VehicleHello& m) const {
        return "VehicleHello{cert=" + m.cert.id.value + ",pk=" + m.pk.value + "}";
    }
    std::string operator()(const AddRequest& m) const {
        return "AddRequest{cert=" + m.cert.value +
               ",reporter=RSU" + std::to_string(m.reporter) + "}";
    }
    std::string operator()(const RemoveRequest& m) const {
        return "RemoveRequest{cert=" + m.cert.value +
               ",reporter=RSU" + std::to_string(m.reporter) + "}";
    }
    std::string operator()(const LcclBroadcast& m) const {
        return "LcclBroadcast{" + m.lccl.to_text() +
               ",epoch=" + std::to_string(m.epoch) + "}";
    }
    std::string operator()(const SignatureRotation& m) const {
        return "SignatureRotation{cluster=" + std::to_string(m.cluster) +
               ",new_epoch=" + std::to_string(m.new_epoch) + "}";
    }
    std::string operator()(const PkRequest& m) const {
        return "PkRequest{target=" + m.target.value + "}";
    }
    std::string operator()(const PkResponse& m) const {
        return "PkResponse{target=" + m.target.value +
               ",pk=" + (m.pk ? m.pk->value : std::string("unknown")) + "}";
    }
    std::string operator()(const C2CMessage& m) const {
        return "C2C{" + to_text(m.envelope) + "}";
    }
    std::string operator()(const SafetyReport& m) const {
        return "SafetyReport{body=" + m.body + "}";
    }
    std::string operator()(const LocalClusterNews& m) const {
        std::string out = "LocalClusterNews{news=[";
        for (std::size_t i = 0; i < m.news.size(); ++i) {
            if (i) out += ",";
            out += m.news[i];
        }
        out += "]," + m.lccl.to_text() + "," + to_text(m.group_sig) +
               ",rsu_pk=" + m.rsu_pk.value + "}";
        return out;
    }
    std::string operator()(const GreyAreaRequest& m) const {
        return "GreyAreaRequest{cert=" + m.cert.id.value + ",pk=" + m.pk.value + "}";
    }
    std::string operator()(const GreyAreaGrant& m) const {
        return "GreyAreaGrant{" + to_text(m.group_sig) + "," + m.lccl.to_text() + "}";
    }
};

}  // namespace

std::string to_text(const ProtocolMessage& msg) {
    return std::visit(TextVisitor{}, msg);
}

MessageSizing MessageSizing::defaults() {
    MessageSizing s;
    s.fixed_bytes = {
        {"VehicleHello", 150},     {"AddRequest", 120},
        {"RemoveRequest", 120},    {"LcclBroadcast", 32},
        {"SignatureRotation", 64}, {"PkRequest", 50},
        {"PkResponse", 80},        {"C2C", 200},
        {"SafetyReport", 100},     {"LocalClusterNews", 64},
        {"GreyAreaRequest", 150},  {"GreyAreaGrant", 64},
    };
    return s;
}

std::size_t message_size_bytes(const ProtocolMessage& msg,
                               const MessageSizing& sizing) {
    const std::string kind = message_kind(msg);
    std::size_t base = 0;
    if (auto it = sizing.fixed_bytes.find(kind); it != sizing.fixed_bytes.end()) {
        base = it->second;
    }
    const Lccl* carried = nullptr;
    if (const auto* b = std::get_if<LcclBroadcast>(&msg)) carried = &b->lccl;
    if (const auto* n = std::get_if<LocalClusterNews>(&msg)) carried = &n->lccl;
    if (const auto* g = std::get_if<GreyAreaGrant>(&msg)) carried = &g->lccl;
    if (carried) {
        base += lccl_size_bytes(*carried, sizing.entry_size_bytes,
                                sizing.header_bytes);
    }
    return base;
}

}  // namespace crevsim
