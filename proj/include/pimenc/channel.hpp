#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "pimenc/blocks.hpp"
#include "pimenc/config.hpp"
#include "pimenc/crypto.hpp"
#include "pimenc/kernel.hpp"

namespace pimenc {

class Engine;

enum class Command : std::uint8_t {
    GetToken = 0x01,
    SetSessionKey = 0x02,
    SetDataKey = 0x03,
    OffloadKernel = 0x04,
    Execute = 0x05,
    Protect = 0x06,
    Destroy = 0x07,
};

/// Fixed-size authenticated control-plane frame. Wire layout, always
/// exactly 281 bytes regardless of command, payload or outcome:
/// command_id (1) || sequence u64 BE (8) || payload (256) || tag (16).
/// Post-session frames are AES-128-GCM sealed with sequence||command_id
/// as AAD; bootstrap frames (GET_TOKEN, SET_SESSION_KEY and their
/// responses) carry plaintext payloads and a zero tag.
struct Frame {
    static constexpr std::size_t kPayloadBytes = 256;
    static constexpr std::size_t kWireBytes = 1 + 8 + kPayloadBytes + crypto::kTagBytes; // 281

    std::array<std::uint8_t, kWireBytes> wire{};

    std::uint8_t command_id() const { return wire[0]; }
    std::uint64_t seq() const;
    std::span<const std::uint8_t, kPayloadBytes> payload_raw() const;

    static Frame sealed(const crypto::Key& key, std::uint8_t direction, Command cmd,
                        std::uint64_t seq, BytesView payload);
    static Frame plain(Command cmd, std::uint64_t seq, BytesView payload);

    /// AEAD open; nullopt on any mutation of the frame or wrong key.
    std::optional<Bytes> open(const crypto::Key& key, std::uint8_t direction) const;
    /// Bootstrap payload (zero-padded plaintext).
    Bytes payload_plain() const;

    static std::optional<Frame> from_wire(BytesView bytes);
};

/// EK-signed statement binding the device identity, its key-exchange
/// public key, the firmware version and the caller's nonce.
/// Wire: device_id u64 BE || kex_pub (32) || fw u32 BE || nonce (32) || sig (64).
struct AttestationToken {
    std::uint64_t device_id = 0;
    crypto::PubKey kex_pub{};
    std::uint32_t firmware_version = 0;
    std::array<std::uint8_t, 32> nonce{};
    crypto::Signature signature{};

    static constexpr std::size_t kWireBytes = 8 + 32 + 4 + 32 + crypto::kSigBytes;

    Bytes serialize() const;
    static std::optional<AttestationToken> parse(BytesView wire);
    bool verify(const crypto::PubKey& trusted_ek, std::span<const std::uint8_t, 32> nonce) const;
};

struct DeviceIdentity {
    std::uint64_t device_id = 0;
    std::uint32_t firmware_version = 1;
    crypto::SignKeyPair ek;
    crypto::KexKeyPair kex;

    AttestationToken issue_token(std::span<const std::uint8_t, 32> nonce) const;
};

enum class Phase : std::uint8_t {
    Idle,
    Attested,
    Established,
    Loaded,
    Destroyed,
    Faulted,
};

/// Cause of a dispatch outcome. Only the local trusted API sees this;
/// on the wire every failure is the same fixed-size error frame.
enum class LocalStatus : std::uint8_t {
    Ok = 0,
    PhaseViolation,
    AuthFailure,
    Replay,
    UnwrapFailure,
    BadPayload,
    UnknownCommand,
    SizeError,
    UnknownKernel,
    KernelFault,
};

namespace status_word {
inline constexpr std::uint64_t kIdle = 0;
inline constexpr std::uint64_t kReady = 1;
inline constexpr std::uint64_t kDone = 3;
inline constexpr std::uint64_t kFault = 4;
inline constexpr std::uint64_t kDestroyed = 5;
} // namespace status_word

namespace frame_dir {
inline constexpr std::uint8_t kHostToDevice = 0x03;
inline constexpr std::uint8_t kDeviceToHost = 0x04;
} // namespace frame_dir

/// Device-side command interface of one bank: verifies frames, walks the
/// session state machine and routes to the PIM core, DMA engine and the
/// bank's access-control registers.
class SessionDevice {
public:
    SessionDevice(Engine& engine, std::uint32_t bank);

    struct Outcome {
        LocalStatus status = LocalStatus::Ok;
        SimTime device_time;
    };

    /// Frame written to the command register.
    Outcome handle_command(const Frame& frame);
    /// Frame written to the parameter register (EXECUTE parameters).
    Outcome handle_param(const Frame& frame);

    Phase phase() const { return phase_; }
    std::uint64_t status() const { return status_; }
    const Frame& last_response() const { return response_; }

    // Trusted local introspection (tests, reports).
    bool session_key_set() const { return session_key_.has_value(); }
    bool data_key_set() const;
    const std::optional<crypto::Digest>& loaded_measurement() const { return measurement_; }
    SimTime last_execute_time() const { return last_exec_time_; }
    std::uint64_t last_execute_cycles() const { return last_exec_cycles_; }

private:
    Outcome finish(LocalStatus st, Command cmd, BytesView body, SimTime device_time);
    Outcome fail(LocalStatus st, Command cmd, SimTime device_time);
    SimTime frame_crypto_cost() const;

    LocalStatus do_get_token(BytesView payload, Bytes& body);
    LocalStatus do_set_session_key(BytesView payload);
    LocalStatus do_set_data_key(BytesView payload);
    LocalStatus do_offload_kernel(BytesView payload, Bytes& body, SimTime& extra);
    LocalStatus do_execute(Bytes& body, SimTime& extra);
    LocalStatus do_protect(BytesView payload);
    void do_destroy();
    void fault();

    Engine& engine_;
    std::uint32_t bank_;

    Phase phase_ = Phase::Idle;
    std::uint64_t status_ = status_word::kIdle;
    std::optional<crypto::Key> session_key_;
    std::uint64_t expected_seq_ = 0;
    std::uint64_t resp_seq_ = 0;
    std::optional<ParamRecord> staged_params_;
    std::string kernel_name_;
    std::optional<crypto::Digest> measurement_;
    Frame response_;
    SimTime last_exec_time_;
    std::uint64_t last_exec_cycles_ = 0;
};

} // namespace pimenc
