#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace loadcast {

enum class NetworkKind { Ffnn, Lstm };
enum class Activation { Relu, Linear };
enum class LossKind { Mae, Mse };

inline constexpr std::array<int, 5> kNeuronGrid{8, 16, 32, 64, 128};
inline constexpr int kMinHiddenLayers = 1;
inline constexpr int kMaxHiddenLayers = 8;

struct NetworkConfig {
    NetworkKind kind = NetworkKind::Ffnn;
    int hidden_layers = 4;
    int neurons = 8;
    int lookback = 12;  ///< LSTM sequence length in steps; ignored for FFNN
    int inputs = 10;
    Activation hidden_activation = Activation::Relu;  ///< FFNN hidden layers only

    /// Throws ConfigError outside 1-8 layers and 1-128 neurons.
    void validate() const;
    /// Rows of input needed per prediction: lookback for LSTM, 1 for FFNN.
    int context() const { return kind == NetworkKind::Lstm ? lookback : 1; }
    std::string label() const;

    bool operator==(const NetworkConfig&) const = default;
};

std::string to_string(NetworkKind kind);
NetworkKind parse_network_kind(const std::string& text);

/// Fully connected layer: out_j = act(sum_i w(i,j) * a_i + b_j).
struct DenseLayer {
    Eigen::MatrixXd weights;  ///< inputs x outputs
    Eigen::VectorXd bias;     ///< outputs
    Activation activation = Activation::Linear;

    DenseLayer() = default;
    DenseLayer(int inputs, int outputs, Activation act);

    int inputs() const { return static_cast<int>(weights.rows()); }
    int outputs() const { return static_cast<int>(weights.cols()); }
};

Eigen::VectorXd dense_forward(const DenseLayer& layer, const Eigen::VectorXd& inputs);

/// LSTM layer acting on the concatenation [h_{t-1}, x_t]. Weight columns are laid out in
/// four blocks of `units`: forget, input, output, candidate.
struct LstmLayer {
    Eigen::MatrixXd weights;  ///< (units + inputs) x (4 * units)
    Eigen::VectorXd bias;     ///< 4 * units
    Eigen::VectorXd h;        ///< carried hidden state
    Eigen::VectorXd c;        ///< carried cell state

    LstmLayer() = default;
    LstmLayer(int inputs, int units);

    int units() const { return static_cast<int>(bias.size() / 4); }
    int inputs() const { return static_cast<int>(weights.rows()) - units(); }
    void reset_state();
};

/// One time step: updates layer.h / layer.c in place and returns the new h.
Eigen::VectorXd lstm_step(LstmLayer& layer, const Eigen::VectorXd& x);

/// Time-major batch: steps[t] is samples x inputs. FFNN batches have exactly one step.
struct SequenceBatch {
    std::vector<Eigen::MatrixXd> steps;

    Eigen::Index samples() const { return steps.empty() ? 0 : steps.front().rows(); }
    SequenceBatch subset(const std::vector<Eigen::Index>& rows) const;
};

/// Slides a window of `context` rows over `rows`; sample k ends at row k + context - 1.
SequenceBatch make_sequences(const Eigen::MatrixXd& rows, int context);

double loss_value(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets, LossKind loss);

/// FFNN (hidden dense layers + linear output unit) or stacked LSTM (+ linear output unit
/// on the final hidden state). Parameters can be viewed as one flat vector, ordered layer
/// by layer, weights (column-major) before bias.
class Network {
public:
    explicit Network(const NetworkConfig& config);
    /// Uniform fan-in scaled weights, zero biases except an LSTM forget-gate bias of 1.
    static Network initialized(const NetworkConfig& config, std::uint64_t seed);

    const NetworkConfig& config() const { return config_; }
    std::size_t parameter_count() const;
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& flat);

    /// One prediction per sample. State is reset to zero at the start of every sample.
    Eigen::VectorXd forward(const SequenceBatch& batch) const;
    /// Loss over the batch; when `gradient` is non-null it receives dLoss/dparameters.
    double loss_and_gradient(const SequenceBatch& batch, const Eigen::VectorXd& targets, LossKind loss,
                             Eigen::VectorXd* gradient) const;
    /// Predictions for rows[context-1 ..], each using the trailing context rows.
    /// Throws ShapeError when fewer than context() rows are given.
    Eigen::VectorXd predict(const Eigen::MatrixXd& rows) const;

    const std::vector<LstmLayer>& lstm_layers() const { return lstm_; }
    std::vector<LstmLayer>& lstm_layers() { return lstm_; }
    const std::vector<DenseLayer>& dense_layers() const { return dense_; }
    std::vector<DenseLayer>& dense_layers() { return dense_; }

private:
    NetworkConfig config_;
    std::vector<LstmLayer> lstm_;
    std::vector<DenseLayer> dense_;
};

} // namespace loadcast
