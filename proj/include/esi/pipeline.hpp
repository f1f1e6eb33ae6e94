// Copyright 2026 The ESI Reconstruction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ESI_PIPELINE_HPP
#define ESI_PIPELINE_HPP

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>

#include "esi/reconstructor.hpp"

namespace esi
{
/// Bounded FIFO between two pipeline stages. close() wakes every waiter;
/// pop() keeps draining queued items after close and then returns nullopt.
template <typename T>
class Channel
{
public:
  explicit Channel(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  /// Blocks while full. Returns false if the channel was closed.
  bool push(T item)
  {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return closed_ || queue_.size() < capacity_; });
    if (closed_) {
      return false;
    }
    queue_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }

  std::optional<T> pop()
  {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) {
      return std::nullopt;
    }
    T item = std::move(queue_.front());
    queue_.pop_front();
    not_full_.notify_one();
    return item;
  }

  void close()
  {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
  }

private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> queue_;
  bool closed_{false};
};

/// Produces the next batch of the stream, or nullopt at end of stream.
using BatchSource = std::function<std::optional<EventBatch>()>;
/// Consumes frames in emission order.
using FrameSink = std::function<void(Frame &&)>;

/// Runs ingestion, reconstruction and the frame sink on three threads joined
/// by bounded channels. With `t_end` set, the reconstructor is finished at
/// that time after the source runs dry. The first exception raised by any
/// stage is rethrown here once every stage has stopped.
void run_staged_pipeline(
  const BatchSource & source, Reconstructor & reconstructor, const FrameSink & sink,
  std::optional<Timestamp> t_end = std::nullopt, std::size_t depth = 8);

}  // namespace esi

#endif  // ESI_PIPELINE_HPP
