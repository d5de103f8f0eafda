#include <string>

#include "truthrl/verifier.hpp"

namespace truthrl {

namespace {

constexpr std::string_view kOutcomeTemplate =
    R"(Assume you are a human expert in grading predictions given by a model. You are given a question and a model prediction. Judge if the prediction matches the ground truth answer by following these steps:
1: Take it as granted that the Ground Truth is always correct.
2: If the Prediction exactly matches the Ground Truth, "score" is 1.
3: If the Prediction does not exactly match the Ground Truth, go through the following steps and likely give a score as 0.
4: If the Ground Truth is a number, "score" is 1 if and only if the Prediction gives a number that almost exactly matches the ground truth.
5: If the Prediction is self-contradictory, "score" must be 0.
6: If the prediction is not answering the question, "score" must be 0.
7: If the prediction is a concise and correct summary of the ground truth, "score" is 1.
8: If ground truth contains a set of items, prediction must contain exactly same items for the score to be 1.
9: Otherwise, "score" is 0.

Output a JSON blob with an "explanation" field explaining your answer as short as possible and an "score" field with value 1 or 0.

You should make the judgment based on provided examples.

Examples: {examples}

Question: {question}

Ground Truth: {ground truth}

Prediction: {predicted answer}
)";

constexpr std::string_view kReasoningTemplate =
    R"(Assume you are a human expert in evaluating the usefulness of model-generated reasoning. You are given a question and a model-generated reasoning. Judge if the reasoning provides precise information to correctly answer the question by following these steps:
1: Evaluate if the reasoning directly addresses the question.
2: Check if the key points in the reasoning are relevant to the query.
3: If the reasoning provides precise and relevant information, "score" is 1.
4: If the reasoning is vague, unrelated, or does not address the question, "score" is 0.

Output a JSON blob with an "explanation" field explaining your answer as short as possible and an "score" field with value 1 or 0.

You should make the judgment based on provided examples.

Examples: {examples}
Question: {question}
Ground Truth: {ground truth}
Reasoning: {predicted reasoning}
)";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
        s.replace(pos, from.size(), to);
}

}  // namespace

std::string_view judge_template(JudgeTemplate id) {
    return id == JudgeTemplate::outcome ? kOutcomeTemplate : kReasoningTemplate;
}

std::string render_prompt(const JudgeRequest& request) {
    std::string out(judge_template(request.template_id));
    // Placeholders are filled in a fixed order; values are not re-scanned.
    std::string marker = "\x01";
    auto fill = [&](std::string_view key, const std::string& value) {
        std::string escaped = value;
        replace_all(escaped, "{", marker);
        replace_all(out, key, escaped);
    };
    fill("{examples}", request.examples);
    fill("{question}", request.question);
    fill("{ground truth}", request.reference);
    if (request.template_id == JudgeTemplate::outcome)
        fill("{predicted answer}", request.prediction);
    else
        fill("{predicted reasoning}", request.reasoning);
    replace_all(out, marker, "{");
    return out;
}

}  // namespace truthrl
